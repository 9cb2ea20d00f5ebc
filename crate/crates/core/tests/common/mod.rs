//! Independent reference implementations used by the integration tests:
//! dense matrix exponentials, a dense exact tilt and small random inputs.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use itebe::{Edge, Graph};

pub type CMat = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `exp(A)` by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm: f64 = (0..n)
        .map(|r| (0..n).map(|col| a[(r, col)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.map(|x| x / 2f64.powi(squarings as i32));
    let mut result = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / c(k as f64);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Single-qubit Pauli `op` on qubit `q` of an `nq`-qubit register (qubit q = bit q).
pub fn pauli_on(nq: usize, q: usize, op: char) -> CMat {
    let dim = 1 << nq;
    let mut m = CMat::zeros(dim, dim);
    for col in 0..dim {
        let bit = (col >> q) & 1;
        match op {
            'X' => m[(col ^ (1 << q), col)] = c(1.0),
            'Z' => m[(col, col)] = c(if bit == 0 { 1.0 } else { -1.0 }),
            _ => panic!("unknown Pauli {op}"),
        }
    }
    m
}

/// `exp(-i (c X_a + W Z_j Z_k X_a))` with the ancilla as the top qubit of `n + 1`.
pub fn parity_rotation_unitary(n: usize, j: usize, k: usize, c_angle: f64, w: f64) -> CMat {
    let nq = n + 1;
    let xa = pauli_on(nq, n, 'X');
    let zz = pauli_on(nq, j, 'Z') * pauli_on(nq, k, 'Z');
    let h = xa.map(|x| x * c_angle) + (zz * &xa).map(|x| x * w);
    expm(&h.map(|x| -I * x))
}

/// Dense `exp(-τK Z_j Z_k)` on `n` qubits.
pub fn zz_propagator(n: usize, j: usize, k: usize, tau_k: f64) -> CMat {
    let zz = pauli_on(n, j, 'Z') * pauli_on(n, k, 'Z');
    expm(&zz.map(|x| -x * tau_k))
}

/// Dense `exp(-τ H_C)` with `H_C = -Σ (w/2)(1 - Z_j Z_k)`, built from Pauli matrices.
pub fn cost_propagator(g: &Graph, tau: f64) -> CMat {
    let n = g.n();
    let dim = 1 << n;
    let mut h = CMat::zeros(dim, dim);
    for e in g.edges() {
        let zz = pauli_on(n, e.j, 'Z') * pauli_on(n, e.k, 'Z');
        h += (CMat::identity(dim, dim) - zz).map(|x| x * (-e.w / 2.0));
    }
    expm(&h.map(|x| -x * tau))
}

pub fn apply(m: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    (m * DVector::from_column_slice(v))
        .iter()
        .copied()
        .collect()
}

pub fn normalized(v: &[Complex64]) -> Vec<Complex64> {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|a| a / norm).collect()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// `|⟨a|b⟩|²` for normalized vectors.
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Cut value from spins, `½ Σ w (1 - s_j s_k)`.
pub fn spin_cut(g: &Graph, z: usize) -> f64 {
    let s = |v: usize| if (z >> v) & 1 == 0 { 1.0 } else { -1.0 };
    g.edges()
        .iter()
        .map(|e| 0.5 * e.w * (1.0 - s(e.j) * s(e.k)))
        .sum()
}

/// `e^{-τ(W_tot - C(z))} ψ₀(z)`, unnormalized.
pub fn tilt(psi: &[Complex64], g: &Graph, tau: f64) -> Vec<Complex64> {
    let w_tot: f64 = g.edges().iter().map(|e| e.w).sum();
    psi.iter()
        .enumerate()
        .map(|(z, a)| a * (-tau * (w_tot - spin_cut(g, z))).exp())
        .collect()
}

pub fn plus_state(n: usize) -> Vec<Complex64> {
    vec![c((0.5f64).powi(n as i32).sqrt()); 1 << n]
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    normalized(&v)
}

/// Random simple graph on `n` vertices with at least one edge; weights are
/// 1 or uniform in [0.2, 2] depending on `weighted`.
pub fn random_graph<R: Rng>(n: usize, weighted: bool, rng: &mut R) -> Graph {
    loop {
        let mut edges = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                if rng.random_bool(0.5) {
                    let w = if weighted {
                        rng.random_range(0.2..2.0)
                    } else {
                        1.0
                    };
                    edges.push(Edge::new(j, k, w));
                }
            }
        }
        if !edges.is_empty() {
            return Graph::new(n, edges).unwrap();
        }
    }
}

/// Least-squares fit of `ln y` against `x`; returns `R²`.
pub fn log_linear_r2(x: &[f64], y: &[f64]) -> f64 {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    sxy * sxy / (sxx * syy)
}

/// Gate-level post-selected state: corrected blocks over `matching` (which
/// must be vertex-disjoint, input `|+⟩^N`), then generic blocks with the
/// ancilla forced onto `|0⟩` over every other edge. Returns the amplitudes and
/// the product of the generic post-selection probabilities.
pub fn gate_postselected(
    g: &Graph,
    tau: f64,
    psi0: &[Complex64],
    matching: &[Edge],
) -> (Vec<Complex64>, f64) {
    use itebe::itebe::{
        apply_corrected_block, corrected_block_params, generic_block_params,
        postselect_generic_block, remaining_edges,
    };
    let mut s = itebe::Statevector::from_amplitudes(g.n(), psi0.to_vec()).unwrap();
    for e in matching {
        apply_corrected_block(
            &mut s,
            e.j,
            e.k,
            &corrected_block_params(tau, e.w / 2.0).unwrap(),
        )
        .unwrap();
    }
    let mut success = 1.0;
    for e in remaining_edges(g, matching).unwrap() {
        success *=
            postselect_generic_block(&mut s, e.j, e.k, &generic_block_params(tau, e.w).unwrap())
                .unwrap();
    }
    (s.amplitudes().to_vec(), success)
}

/// Columns of the parity-rotation gate as applied by the engine, assembled
/// into a dense `2^{n+1}` matrix.
pub fn engine_parity_rotation(n: usize, j: usize, k: usize, c_angle: f64, w: f64) -> CMat {
    use std::f64::consts::PI;
    let dim = 1 << (n + 1);
    let mut m = CMat::zeros(dim, dim);
    for col in 0..dim {
        let mut s = itebe::Statevector::basis(n, (col & ((1 << n) - 1)) as u64).unwrap();
        s.attach_ancilla().unwrap();
        // Rx(π) = -iX: undo the phase afterwards
        let phase = if col >> n == 1 {
            s.apply_rx(n, PI).unwrap();
            I
        } else {
            c(1.0)
        };
        s.apply_parity_ancilla_rotation(j, k, c_angle, w).unwrap();
        for (row, a) in s.amplitudes().iter().enumerate() {
            m[(row, col)] = a * phase;
        }
    }
    m
}
