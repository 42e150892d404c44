//! Tests across several populations.
//!
//! Two populations are judged homogeneous when each one's data passes the
//! test built from the other's fitted parameters. The homogeneity test over
//! `n` populations runs every unordered pair at the same level; its
//! family-wise error stays at that level because the union of independent
//! rejection events has belief degree equal to the largest component.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::testing::{
    acceptance_interval, fit_and_verify, AcceptanceInterval, PopulationSample, TestDecision,
};
use crate::udist::{BeliefLevel, NormalUncertain};

/// Which parameters are unknown and therefore compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterCase {
    /// Scales known, locations compared.
    MeansUnknown,
    /// Locations known, scales compared.
    SigmasUnknown,
    /// Both unknown and compared jointly.
    BothUnknown,
}

impl ParameterCase {
    /// Checks that `pop` carries the known parameter this case needs.
    ///
    /// `BothUnknown` rejects populations that carry known parameters, since
    /// those would be silently ignored by the cross intervals.
    pub fn check(self, pop: &PopulationSample) -> Result<()> {
        let (e, s) = (pop.known_e().is_some(), pop.known_sigma().is_some());
        let ok = match self {
            ParameterCase::MeansUnknown => s,
            ParameterCase::SigmasUnknown => e,
            ParameterCase::BothUnknown => !e && !s,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Configuration(format!(
                "population `{}` (known_e: {}, known_sigma: {}) does not fit case {}",
                pop.id(),
                fmt_known(pop.known_e()),
                fmt_known(pop.known_sigma()),
                self.label()
            )))
        }
    }

    /// Resolves the case from which parameters the populations carry.
    pub fn resolve(pops: &[PopulationSample]) -> Result<Self> {
        if pops.is_empty() {
            return Err(Error::Argument(
                "no populations to resolve a case from".into(),
            ));
        }
        let all = |f: fn(&PopulationSample) -> bool| pops.iter().all(f);
        let case = if all(|p| p.known_sigma().is_some()) {
            ParameterCase::MeansUnknown
        } else if all(|p| p.known_e().is_some()) {
            ParameterCase::SigmasUnknown
        } else if all(|p| p.known_e().is_none() && p.known_sigma().is_none()) {
            ParameterCase::BothUnknown
        } else {
            return Err(Error::Configuration(
                "known parameters are mixed across populations; either every population \
                 carries known_sigma, every population carries known_e, or none carries either"
                    .into(),
            ));
        };
        Ok(case)
    }

    pub fn label(self) -> &'static str {
        match self {
            ParameterCase::MeansUnknown => "means unknown",
            ParameterCase::SigmasUnknown => "sigmas unknown",
            ParameterCase::BothUnknown => "both unknown",
        }
    }
}

fn fmt_known(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

/// Family-wise level of simultaneous independent tests: the largest component level.
pub fn ufwer(alphas: &[BeliefLevel]) -> Result<BeliefLevel> {
    alphas
        .iter()
        .copied()
        .reduce(|a, b| if b.value() > a.value() { b } else { a })
        .ok_or_else(|| Error::Argument("ufwer of an empty family".into()))
}

/// Acceptance interval for the data of `pop_i` under the parameters fitted to population `j`.
///
/// The compared parameter comes from `fit_j`; the known one comes from `pop_i`.
pub fn cross_interval(
    case: ParameterCase,
    pop_i: &PopulationSample,
    fit_j: &NormalUncertain,
    alpha: BeliefLevel,
) -> Result<AcceptanceInterval> {
    let missing = |what: &str| {
        Error::Configuration(format!(
            "population `{}` needs {what} under case {}",
            pop_i.id(),
            case.label()
        ))
    };
    let composite = match case {
        ParameterCase::MeansUnknown => {
            let sigma = pop_i.known_sigma().ok_or_else(|| missing("known_sigma"))?;
            NormalUncertain::new(fit_j.e(), sigma)?
        }
        ParameterCase::SigmasUnknown => {
            let e = pop_i.known_e().ok_or_else(|| missing("known_e"))?;
            NormalUncertain::new(e, fit_j.sigma())?
        }
        ParameterCase::BothUnknown => *fit_j,
    };
    Ok(acceptance_interval(&composite, alpha))
}

/// The two cross tests between populations `i` and `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseDecision {
    pub i: String,
    pub j: String,
    /// Data of `i` against the parameters of `j`.
    pub i_vs_j: TestDecision,
    /// Data of `j` against the parameters of `i`.
    pub j_vs_i: TestDecision,
    pub homogeneous: bool,
}

impl PairwiseDecision {
    pub fn involves(&self, a: &str, b: &str) -> bool {
        (self.i == a && self.j == b) || (self.i == b && self.j == a)
    }

    /// Decision for the data of `data` against the parameters of `source`.
    pub fn decision(&self, data: &str, source: &str) -> Option<&TestDecision> {
        if self.i == data && self.j == source {
            Some(&self.i_vs_j)
        } else if self.j == data && self.i == source {
            Some(&self.j_vs_i)
        } else {
            None
        }
    }
}

pub fn pairwise_test(
    case: ParameterCase,
    pop_i: &PopulationSample,
    pop_j: &PopulationSample,
    fit_i: &NormalUncertain,
    fit_j: &NormalUncertain,
    alpha: BeliefLevel,
) -> Result<PairwiseDecision> {
    let i_vs_j =
        TestDecision::evaluate(pop_i.values(), cross_interval(case, pop_i, fit_j, alpha)?)?;
    let j_vs_i =
        TestDecision::evaluate(pop_j.values(), cross_interval(case, pop_j, fit_i, alpha)?)?;
    let homogeneous = !i_vs_j.rejected && !j_vs_i.rejected;
    Ok(PairwiseDecision {
        i: pop_i.id().to_string(),
        j: pop_j.id().to_string(),
        i_vs_j,
        j_vs_i,
        homogeneous,
    })
}

/// Outcome of the homogeneity test over all populations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityResult {
    pub case: ParameterCase,
    pub alpha: BeliefLevel,
    /// Family-wise level of all component tests.
    pub ufwer: BeliefLevel,
    pub fits: IndexMap<String, NormalUncertain>,
    pub self_tests: IndexMap<String, TestDecision>,
    /// Unordered pairs in input order: (1,2), (1,3), ..., (2,3), ...
    pub pairwise: Vec<PairwiseDecision>,
    pub rejected: bool,
    pub groups: Vec<Vec<String>>,
}

impl HomogeneityResult {
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.fits.keys().map(String::as_str)
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairwiseDecision> {
        self.pairwise.iter().find(|p| p.involves(a, b))
    }

    /// Decision for the data of `data` against the parameters of `source`;
    /// the diagonal is the self-test.
    pub fn decision(&self, data: &str, source: &str) -> Option<&TestDecision> {
        if data == source {
            self.self_tests.get(data)
        } else {
            self.pair(data, source)?.decision(data, source)
        }
    }

    /// Populations whose data reject their own fit.
    pub fn self_test_failures(&self) -> Vec<&str> {
        self.self_tests
            .iter()
            .filter(|(_, d)| d.rejected)
            .map(|(id, _)| id.as_str())
            .collect()
    }
}

/// Fits every population, runs all pairwise tests and groups the populations.
///
/// A population failing its self-test is still included in the pairwise
/// tests; callers can inspect [`HomogeneityResult::self_test_failures`].
pub fn homogeneity_test(
    pops: &[PopulationSample],
    case: ParameterCase,
    alpha: BeliefLevel,
) -> Result<HomogeneityResult> {
    if pops.len() < 2 {
        return Err(Error::Argument(format!(
            "homogeneity test needs at least 2 populations, got {}",
            pops.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for p in pops {
        if !seen.insert(p.id()) {
            return Err(Error::Argument(format!(
                "duplicate population id `{}`",
                p.id()
            )));
        }
        case.check(p)?;
    }

    let mut fits = IndexMap::with_capacity(pops.len());
    let mut self_tests = IndexMap::with_capacity(pops.len());
    for p in pops {
        let (fit, decision) = fit_and_verify(p, alpha)?;
        fits.insert(p.id().to_string(), fit);
        self_tests.insert(p.id().to_string(), decision);
    }

    let mut pairwise = Vec::with_capacity(pops.len() * (pops.len() - 1) / 2);
    for (a, pop_a) in pops.iter().enumerate() {
        for pop_b in &pops[a + 1..] {
            pairwise.push(pairwise_test(
                case,
                pop_a,
                pop_b,
                &fits[pop_a.id()],
                &fits[pop_b.id()],
                alpha,
            )?);
        }
    }
    let component_levels = vec![alpha; self_tests.len() + 2 * pairwise.len()];
    let ufwer = ufwer(&component_levels)?;
    let rejected = pairwise.iter().any(|p| !p.homogeneous);
    let ids: Vec<String> = pops.iter().map(|p| p.id().to_string()).collect();
    let groups = homogeneous_groups(&ids, &pairwise)?;

    Ok(HomogeneityResult {
        case,
        alpha,
        ufwer,
        fits,
        self_tests,
        pairwise,
        rejected,
        groups,
    })
}

/// Maximal cliques of the graph whose edges are the homogeneous pairs.
///
/// Members of each group keep the order of `ids`. Groups are sorted by
/// descending size, then lexicographically by their members' ids.
pub fn homogeneous_groups(
    ids: &[String],
    pairwise: &[PairwiseDecision],
) -> Result<Vec<Vec<String>>> {
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(k, id)| (id.as_str(), k))
        .collect();
    if index.len() != ids.len() {
        return Err(Error::Argument("duplicate ids in group discovery".into()));
    }
    let n = ids.len();
    let mut covered = vec![vec![false; n]; n];
    let mut adjacent = vec![vec![false; n]; n];
    for p in pairwise {
        let (a, b) = match (index.get(p.i.as_str()), index.get(p.j.as_str())) {
            (Some(&a), Some(&b)) if a != b => (a, b),
            _ => {
                return Err(Error::Argument(format!(
                    "pairwise decision ({}, {}) does not refer to two distinct known ids",
                    p.i, p.j
                )))
            }
        };
        covered[a][b] = true;
        covered[b][a] = true;
        adjacent[a][b] = p.homogeneous;
        adjacent[b][a] = p.homogeneous;
    }
    for a in 0..n {
        for b in a + 1..n {
            if !covered[a][b] {
                return Err(Error::Argument(format!(
                    "no pairwise decision for ({}, {})",
                    ids[a], ids[b]
                )));
            }
        }
    }

    let mut cliques = Vec::new();
    bron_kerbosch(
        &adjacent,
        Vec::new(),
        (0..n).collect(),
        Vec::new(),
        &mut cliques,
    );

    let mut groups: Vec<Vec<String>> = cliques
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c.into_iter().map(|k| ids[k].clone()).collect()
        })
        .collect();
    groups.sort_by(|a, b| {
        b.len().cmp(&a.len()).then_with(|| {
            let mut sa: Vec<&String> = a.iter().collect();
            let mut sb: Vec<&String> = b.iter().collect();
            sa.sort();
            sb.sort();
            sa.cmp(&sb)
        })
    });
    Ok(groups)
}

/// Bron–Kerbosch with pivoting over an adjacency matrix.
fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r);
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p is non-empty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut next_r = r.clone();
        next_r.push(v);
        let next_p = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let next_x = x.iter().copied().filter(|&w| adj[v][w]).collect();
        bron_kerbosch(adj, next_r, next_p, next_x, out);
        p.retain(|&w| w != v);
        x.push(v);
    }
}
