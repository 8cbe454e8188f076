//! Operational-stage counts: walkless scheme versus a generic circuit.
//!
//! A walk of dimension `N` occupies `m = log2(N^2)` qubits in a circuit. A
//! generic `m`-qubit unitary needs about `4^m` CNOTs and at most `m / 2` of
//! them can run in parallel, so one step costs `4^m / (m/2)` stages, which
//! equals `2 N^4 / log2(N^2)`. The compiled coins need `N - 1` stages.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::is_power_of_two;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("dimension {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("dimension {0} is too large for exact stage counts")]
    TooLarge(usize),
    #[error("circuit stage formulas disagree: {0}/{1} vs {2}/{3}")]
    FormulaMismatch(u128, u128, u128, u128),
}

/// Exact non-negative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: u128,
    pub den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Fraction {
    pub fn new(num: u128, den: u128) -> Self {
        assert!(den != 0);
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub n: usize,
    /// Qubits for the circuit representation, `log2(N^2)`.
    pub m: u32,
    pub walkless_stages_per_step: u64,
    /// `4^m / (m / 2)`.
    pub circuit_stages_per_step: Fraction,
    /// `2 N^4 / log2(N^2)`, computed independently.
    pub circuit_stages_per_step_alt: Fraction,
    pub speedup: f64,
    pub n_steps: u64,
    pub walkless_total: u64,
    pub circuit_total: f64,
}

pub fn cost_report(n: usize, n_steps: u64) -> Result<CostReport, CostError> {
    if n < 2 || !is_power_of_two(n) {
        return Err(CostError::NotPowerOfTwo(n));
    }
    let log_n = n.trailing_zeros();
    let m = 2 * log_n;
    // 4^m = 2^(2m) must fit a u128 with room for the factor 2
    if 2 * m > 120 {
        return Err(CostError::TooLarge(n));
    }
    let four_pow_m: u128 = 1u128 << (2 * m);
    let circuit = Fraction::new(2 * four_pow_m, m as u128);

    let n4 = (n as u128).pow(4);
    let log2_n2 = (2 * log_n) as u128;
    let alt = Fraction::new(2 * n4, log2_n2);
    if circuit != alt {
        return Err(CostError::FormulaMismatch(
            circuit.num,
            circuit.den,
            alt.num,
            alt.den,
        ));
    }

    let walkless = (n - 1) as u64;
    Ok(CostReport {
        n,
        m,
        walkless_stages_per_step: walkless,
        circuit_stages_per_step: circuit,
        circuit_stages_per_step_alt: alt,
        speedup: circuit.value() / walkless as f64,
        n_steps,
        walkless_total: walkless * n_steps,
        circuit_total: circuit.value() * n_steps as f64,
    })
}

impl CostReport {
    /// Plain-text table for terminals.
    pub fn table(&self) -> String {
        let c = &self.circuit_stages_per_step;
        let circuit = if c.den == 1 {
            c.num.to_string()
        } else {
            format!("{}/{} (~{:.2})", c.num, c.den, c.value())
        };
        let rows = [
            ("dimension N", self.n.to_string()),
            ("circuit qubits m", self.m.to_string()),
            (
                "walkless stages / step",
                self.walkless_stages_per_step.to_string(),
            ),
            ("circuit stages / step", circuit),
            ("speedup", format!("{:.2}", self.speedup)),
            ("steps", self.n_steps.to_string()),
            ("walkless stages total", self.walkless_total.to_string()),
            ("circuit stages total", format!("{:.2}", self.circuit_total)),
        ];
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_nodes() {
        let r = cost_report(4, 10).unwrap();
        assert_eq!(r.walkless_stages_per_step, 3);
        assert_eq!(r.m, 4);
        assert_eq!(r.circuit_stages_per_step, Fraction { num: 128, den: 1 });
        assert_eq!(r.walkless_total, 30);
        assert_eq!(r.circuit_total, 1280.0);
    }

    #[test]
    fn two_nodes() {
        let r = cost_report(2, 1).unwrap();
        assert_eq!(r.walkless_stages_per_step, 1);
        assert_eq!(r.m, 2);
        assert_eq!(r.circuit_stages_per_step, Fraction { num: 16, den: 1 });
    }

    #[test]
    fn eight_nodes_is_fractional() {
        // 4^6 / 3 = 4096 / 3
        let r = cost_report(8, 1).unwrap();
        assert_eq!(r.circuit_stages_per_step, Fraction { num: 4096, den: 3 });
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert_eq!(cost_report(6, 1), Err(CostError::NotPowerOfTwo(6)));
        assert_eq!(cost_report(1, 1), Err(CostError::NotPowerOfTwo(1)));
    }

    #[test]
    fn speedup_grows() {
        let mut last = 0.0;
        let mut n = 2;
        while n <= 1024 {
            let r = cost_report(n, 1).unwrap();
            assert!(r.speedup > last);
            last = r.speedup;
            n *= 2;
        }
    }
}
