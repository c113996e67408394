//! Round charges for distributed Grover searches and a small statevector
//! kernel used to check the amplitude-amplification closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::sampling::Coin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub domain_size: u64,
    /// Rounds needed to evaluate the predicate once.
    pub eval_rounds: u64,
    /// Number of simultaneous searches.
    pub multiplicity: u64,
    /// Upper bound on how many searches may query one element.
    pub collision_bound: u64,
}

impl SearchSpec {
    pub fn single(domain_size: u64, eval_rounds: u64) -> Self {
        SearchSpec {
            domain_size,
            eval_rounds,
            multiplicity: 1,
            collision_bound: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroverParams {
    pub iteration_multiplier: f64,
    pub repetition_count: u64,
    /// Probability that an individual search is reported as failed. Zero
    /// keeps every run deterministic.
    pub failure_rate: f64,
}

impl Default for GroverParams {
    fn default() -> Self {
        GroverParams {
            iteration_multiplier: std::f64::consts::FRAC_PI_4,
            repetition_count: 1,
            failure_rate: 0.0,
        }
    }
}

/// Grover iterations for a domain of the given size.
pub fn iterations(domain_size: u64, params: &GroverParams) -> u64 {
    if domain_size == 0 {
        return 0;
    }
    (params.iteration_multiplier * (domain_size as f64).sqrt()).ceil() as u64
}

pub fn charged_rounds_single(spec: &SearchSpec, params: &GroverParams) -> u64 {
    params.repetition_count * iterations(spec.domain_size, params) * spec.eval_rounds
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreconditionViolation {
    /// `|X| < m / (36 log m)` fails.
    DomainTooLarge,
    /// `beta > 8m / |X|` fails.
    CollisionBoundTooSmall,
}

/// Checks the two conditions under which `m` searches can run in parallel.
pub fn check_multi_search_preconditions(spec: &SearchSpec) -> Vec<PreconditionViolation> {
    let mut out = Vec::new();
    let m = spec.multiplicity as f64;
    let x = spec.domain_size as f64;
    let cap = if spec.multiplicity > 1 {
        m / (36.0 * m.log2())
    } else {
        0.0
    };
    if !(x < cap) {
        out.push(PreconditionViolation::DomainTooLarge);
    }
    // beta > 8m/|X|  <=>  beta * |X| > 8m, in integers
    let lhs = spec.collision_bound as u128 * spec.domain_size as u128;
    if lhs <= 8 * spec.multiplicity as u128 {
        out.push(PreconditionViolation::CollisionBoundTooSmall);
    }
    out
}

pub fn grover_success_probability(n: u64, marked: u64, k: u64) -> Result<f64> {
    if n == 0 || marked == 0 || marked > n {
        return Err(Error::Domain(format!(
            "need 1 <= marked <= N, got marked={marked}, N={n}"
        )));
    }
    let theta = (marked as f64 / n as f64).sqrt().asin();
    Ok(((2 * k + 1) as f64 * theta).sin().powi(2))
}

pub const STATEVECTOR_LIMIT: usize = 1 << 14;

/// Applies `k` rounds of phase oracle followed by inversion about the mean to
/// the uniform state over `n` basis states.
pub fn statevector_amplify(n: usize, marked: &[usize], k: u64) -> Result<Vec<f64>> {
    if n == 0 || n > STATEVECTOR_LIMIT {
        return Err(Error::Domain(format!("statevector size {n} outside 1..={STATEVECTOR_LIMIT}")));
    }
    if let Some(&bad) = marked.iter().find(|&&i| i >= n) {
        return Err(Error::Domain(format!("marked index {bad} out of range")));
    }
    let mut is_marked = vec![false; n];
    for &i in marked {
        is_marked[i] = true;
    }
    let mut amp = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..k {
        for (a, &m) in amp.iter_mut().zip(&is_marked) {
            if m {
                *a = -*a;
            }
        }
        let mean = amp.iter().sum::<f64>() / n as f64;
        for a in amp.iter_mut() {
            *a = 2.0 * mean - *a;
        }
    }
    Ok(amp)
}

pub fn marked_mass(amp: &[f64], marked: &[usize]) -> f64 {
    let mut seen = std::collections::BTreeSet::new();
    marked
        .iter()
        .filter(|&&i| seen.insert(i))
        .map(|&i| amp[i] * amp[i])
        .sum()
}

/// Deterministic failure injection for search `search_id`.
pub fn search_fails(params: &GroverParams, seed: u64, search_id: u64) -> bool {
    params.failure_rate > 0.0 && Coin::new(seed, 0x6772_6f76, params.failure_rate).flip(search_id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_search_charges() {
        let p = GroverParams::default();
        assert_eq!(charged_rounds_single(&SearchSpec::single(1, 2), &p), 2);
        assert_eq!(charged_rounds_single(&SearchSpec::single(100, 2), &p), 16);
        assert_eq!(charged_rounds_single(&SearchSpec::single(0, 2), &p), 0);
    }

    #[test]
    fn multi_search_preconditions() {
        let spec = |x, m, b| SearchSpec {
            domain_size: x,
            eval_rounds: 1,
            multiplicity: m,
            collision_bound: b,
        };
        assert!(check_multi_search_preconditions(&spec(2, 1000, 4001)).is_empty());
        assert_eq!(
            check_multi_search_preconditions(&spec(2, 1000, 4000)),
            vec![PreconditionViolation::CollisionBoundTooSmall]
        );
        assert!(check_multi_search_preconditions(&spec(1000, 1000, 1_000_000))
            .contains(&PreconditionViolation::DomainTooLarge));
    }

    #[test]
    fn success_probability_examples() {
        assert!((grover_success_probability(4, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((grover_success_probability(2, 1, 0).unwrap() - 0.5).abs() < 1e-12);
        assert!((grover_success_probability(16, 1, 3).unwrap() - 0.9613).abs() < 1e-4);
        assert!(grover_success_probability(4, 5, 1).is_err());
    }

    #[test]
    fn statevector_examples() {
        let a = statevector_amplify(8, &[1, 5], 0).unwrap();
        assert!((marked_mass(&a, &[1, 5]) - 0.25).abs() < 1e-12);
        let a = statevector_amplify(4, &[3], 1).unwrap();
        assert!((marked_mass(&a, &[3]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_kernel_on_grid() {
        for n in [2usize, 3, 5, 16, 100, 256, 1024] {
            let kmax = (std::f64::consts::FRAC_PI_4 * (n as f64).sqrt()).ceil() as u64;
            for m in 1..=8.min(n / 2) {
                let marked: Vec<usize> = (0..m).map(|i| (i * 7919) % n).collect();
                let mut uniq = marked.clone();
                uniq.sort_unstable();
                uniq.dedup();
                for k in 0..=kmax {
                    let a = statevector_amplify(n, &uniq, k).unwrap();
                    let p = grover_success_probability(n as u64, uniq.len() as u64, k).unwrap();
                    assert!((marked_mass(&a, &uniq) - p).abs() < 1e-9, "n={n} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn injection_off_by_default() {
        let p = GroverParams::default();
        assert!(!(0..100).any(|i| search_fails(&p, 1, i)));
        let always = GroverParams { failure_rate: 1.0, ..p };
        assert!(search_fails(&always, 1, 0));
    }

    proptest! {
        #[test]
        fn amplify_preserves_norm(n in 1usize..300, seed in 0usize..1000, k in 0u64..20) {
            let marked = vec![seed % n];
            let a = statevector_amplify(n, &marked, k).unwrap();
            let norm: f64 = a.iter().map(|x| x * x).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }

        #[test]
        fn charge_monotone_in_domain_and_linear_in_rounds(x in 0u64..100_000, d in 0u64..1000, r in 1u64..50) {
            let p = GroverParams::default();
            let a = charged_rounds_single(&SearchSpec::single(x, r), &p);
            let b = charged_rounds_single(&SearchSpec::single(x + d, r), &p);
            prop_assert!(a <= b);
            prop_assert_eq!(charged_rounds_single(&SearchSpec::single(x, 1), &p) * r, a);
        }
    }
}
