#![allow(dead_code)]

use uncertest::{BeliefLevel, PopulationSample};

pub const EXAMPLE1: &str = include_str!("../../../../data/example1.csv");
pub const EXAMPLE2: &str = include_str!("../../../../data/example2.csv");
pub const EXAMPLE3: &str = include_str!("../../../../data/example3.csv");
pub const DENTAL: &str = include_str!("../../../../data/dental_marks.csv");

pub fn alpha() -> BeliefLevel {
    BeliefLevel::new(0.05).unwrap()
}

/// Splits a `population,value` table into per-population value lists, in file order.
pub fn columns(csv: &str) -> Vec<(String, Vec<f64>)> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    for line in csv.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        let (id, value) = line.split_once(',').unwrap();
        let value: f64 = value.trim().parse().unwrap();
        match out.iter_mut().find(|(k, _)| k == id) {
            Some((_, v)) => v.push(value),
            None => out.push((id.to_string(), vec![value])),
        }
    }
    out
}

pub fn samples(csv: &str, known_e: &[f64], known_sigma: &[f64]) -> Vec<PopulationSample> {
    columns(csv)
        .into_iter()
        .enumerate()
        .map(|(k, (id, v))| {
            PopulationSample::new(id, v, known_e.get(k).copied(), known_sigma.get(k).copied())
                .unwrap()
        })
        .collect()
}

pub fn example1() -> Vec<PopulationSample> {
    samples(EXAMPLE1, &[4.5, 5.0, 5.5], &[])
}

pub fn example2() -> Vec<PopulationSample> {
    samples(EXAMPLE2, &[], &[1.0, 1.5, 2.0])
}

pub fn example3() -> Vec<PopulationSample> {
    samples(EXAMPLE3, &[], &[])
}

pub fn dental() -> Vec<PopulationSample> {
    samples(DENTAL, &[], &[])
}

pub fn close(actual: f64, expected: f64, tol: f64) -> bool {
    (actual - expected).abs() <= tol
}
