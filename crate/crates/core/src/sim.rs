//! Dense statevector over `N` data qubits plus one optional, reusable ancilla.
//!
//! Basis index layout: data qubit `j` is bit `j`; the ancilla, when attached,
//! is the highest bit (qubit index `N`).

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Assignment, Graph};

/// Total qubit budget, data plus ancilla.
pub const MAX_QUBITS: usize = 24;

/// Largest squared-norm residual tolerated when detaching the ancilla.
pub const DISENTANGLE_TOL: f64 = 1e-9;

/// Branch weights below this are treated as impossible outcomes.
pub const DEGENERATE_NORM: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_data: usize,
    has_ancilla: bool,
    amps: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    pub bit: u8,
    /// Born weight of the observed branch before collapse.
    pub probability: f64,
}

fn check_capacity(qubits: usize) -> Result<()> {
    if qubits == 0 {
        return Err(Error::InvalidArgument(
            "statevector needs at least one qubit".into(),
        ));
    }
    if qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "qubits",
            value: qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

impl Statevector {
    /// `|+⟩^{⊗n}` with no ancilla.
    pub fn init_plus(n: usize) -> Result<Self> {
        check_capacity(n)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Statevector {
            num_data: n,
            has_ancilla: false,
            amps: vec![a; dim],
        })
    }

    /// Computational basis state `|bits⟩` on `n` data qubits.
    pub fn basis(n: usize, bits: u64) -> Result<Self> {
        check_capacity(n)?;
        if bits >> n != 0 {
            return Err(Error::InvalidArgument(format!(
                "basis index {bits} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![ZERO; 1usize << n];
        amps[bits as usize] = Complex64::new(1.0, 0.0);
        Ok(Statevector {
            num_data: n,
            has_ancilla: false,
            amps,
        })
    }

    /// Data-only state from raw amplitudes; the vector is normalized.
    pub fn from_amplitudes(n: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        check_capacity(n)?;
        if amps.len() != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for {n} qubits",
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !norm.is_finite() || norm < DEGENERATE_NORM {
            return Err(Error::Numerical(format!(
                "cannot normalize state of norm² {norm}"
            )));
        }
        let scale = norm.sqrt().recip();
        amps.iter_mut().for_each(|a| *a *= scale);
        Ok(Statevector {
            num_data: n,
            has_ancilla: false,
            amps,
        })
    }

    pub fn num_data(&self) -> usize {
        self.num_data
    }

    pub fn has_ancilla(&self) -> bool {
        self.has_ancilla
    }

    pub fn num_qubits(&self) -> usize {
        self.num_data + usize::from(self.has_ancilla)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Qubit index of the ancilla.
    pub fn ancilla(&self) -> Result<usize> {
        if self.has_ancilla {
            Ok(self.num_data)
        } else {
            Err(Error::State("no ancilla attached".into()))
        }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits() {
            return Err(Error::Index {
                index: q,
                len: self.num_qubits(),
            });
        }
        Ok(())
    }

    fn check_data_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_data {
            return Err(Error::Index {
                index: q,
                len: self.num_data,
            });
        }
        Ok(())
    }

    fn data_mask(&self) -> usize {
        (1usize << self.num_data) - 1
    }

    /// `exp(-i θ/2 X)` on qubit `q`.
    pub fn apply_rx(&mut self, q: usize, theta: f64) -> Result<()> {
        self.check_qubit(q)?;
        let (s, c) = (0.5 * theta).sin_cos();
        let stride = 1usize << q;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = x0 * c - Complex64::i() * x1 * s;
                *a1 = x1 * c - Complex64::i() * x0 * s;
            }
        }
        Ok(())
    }

    /// `exp(-i γ H_C)` for the MaxCut cost Hamiltonian of `g`.
    pub fn apply_cost_phase(&mut self, g: &Graph, gamma: f64) -> Result<()> {
        if g.n() != self.num_data {
            return Err(Error::InvalidArgument(format!(
                "graph on {} vertices applied to {} data qubits",
                g.n(),
                self.num_data
            )));
        }
        if gamma == 0.0 {
            return Ok(());
        }
        let mask = self.data_mask();
        let phases: Vec<Complex64> = (0..=mask)
            .map(|z| Complex64::from_polar(1.0, gamma * g.cut_bits(z as u64)))
            .collect();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            *a *= phases[idx & mask];
        }
        Ok(())
    }

    /// `exp(-i (c X_a + W Z_j Z_k X_a))`: on each data basis state with parity
    /// `λ = (-1)^(z_j ⊕ z_k)` the ancilla is rotated by `exp(-i (c + λW) X_a)`.
    pub fn apply_parity_ancilla_rotation(
        &mut self,
        j: usize,
        k: usize,
        c: f64,
        w: f64,
    ) -> Result<()> {
        self.ancilla()?;
        self.check_data_qubit(j)?;
        self.check_data_qubit(k)?;
        if j == k {
            return Err(Error::InvalidArgument(format!(
                "parity rotation needs j != k, got {j}"
            )));
        }
        let (s_even, c_even) = (c + w).sin_cos();
        let (s_odd, c_odd) = (c - w).sin_cos();
        let half = 1usize << self.num_data;
        let (lo, hi) = self.amps.split_at_mut(half);
        for (z, (a0, a1)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            let odd = ((z >> j) ^ (z >> k)) & 1 == 1;
            let (s, c) = if odd {
                (s_odd, c_odd)
            } else {
                (s_even, c_even)
            };
            let (x0, x1) = (*a0, *a1);
            *a0 = x0 * c - Complex64::i() * x1 * s;
            *a1 = x1 * c - Complex64::i() * x0 * s;
        }
        Ok(())
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidArgument(format!(
                "controlled-X needs distinct qubits, got {control} twice"
            )));
        }
        let (cbit, tbit) = (1usize << control, 1usize << target);
        for idx in 0..self.amps.len() {
            if idx & cbit != 0 && idx & tbit == 0 {
                self.amps.swap(idx, idx | tbit);
            }
        }
        Ok(())
    }

    /// Probability that qubit `q` reads 1.
    pub fn probability_of_one(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Collapses qubit `q` onto `bit` and renormalizes; returns the branch weight.
    pub fn postselect_qubit(&mut self, q: usize, bit: u8) -> Result<f64> {
        let p1 = self.probability_of_one(q)?;
        let prob = if bit == 1 { p1 } else { 1.0 - p1 };
        if prob < DEGENERATE_NORM {
            return Err(Error::Numerical(format!(
                "post-selecting qubit {q} on {bit} has weight {prob:e}"
            )));
        }
        let mask = 1usize << q;
        let keep = if bit == 1 { mask } else { 0 };
        let scale = prob.sqrt().recip();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & mask == keep {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        Ok(prob)
    }

    /// Projective Z measurement of qubit `q` with collapse.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        let p1 = self.probability_of_one(q)?;
        let bit = u8::from(rng.random::<f64>() < p1);
        let probability = self.postselect_qubit(q, bit)?;
        Ok(MeasurementOutcome { bit, probability })
    }

    /// Marginal distribution over data basis states (ancilla traced out).
    pub fn data_probabilities(&self) -> Vec<f64> {
        let mask = self.data_mask();
        let mut out = vec![0.0; mask + 1];
        for (idx, a) in self.amps.iter().enumerate() {
            out[idx & mask] += a.norm_sqr();
        }
        out
    }

    /// I.i.d. computational-basis samples of the data register.
    ///
    /// An attached ancilla must sit in `|0⟩`.
    pub fn sample_bitstrings<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        shots: usize,
    ) -> Result<Vec<Assignment>> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        if self.has_ancilla {
            let p1 = self.probability_of_one(self.num_data)?;
            if p1 > DISENTANGLE_TOL {
                return Err(Error::State(format!(
                    "ancilla not in |0⟩ at sampling time (P(1) = {p1:e})"
                )));
            }
        }
        let dist = WeightedIndex::new(self.data_probabilities())
            .map_err(|e| Error::Numerical(format!("cannot sample state: {e}")))?;
        (0..shots)
            .map(|_| Assignment::new(self.num_data, dist.sample(rng) as u64))
            .collect()
    }

    /// Tensors `|0_a⟩` onto the register.
    pub fn attach_ancilla(&mut self) -> Result<()> {
        if self.has_ancilla {
            return Err(Error::State("ancilla already attached".into()));
        }
        check_capacity(self.num_data + 1)?;
        self.amps.resize(self.amps.len() * 2, ZERO);
        self.has_ancilla = true;
        Ok(())
    }

    /// Drops a disentangled ancilla and returns the factorization residual.
    ///
    /// The two ancilla-conditioned data vectors must be parallel; the residual
    /// is the squared norm of the smaller one's component orthogonal to the
    /// larger one.
    pub fn reset_and_detach_ancilla(&mut self) -> Result<f64> {
        self.ancilla()?;
        let half = 1usize << self.num_data;
        let (v0, v1) = self.amps.split_at(half);
        let n0: f64 = v0.iter().map(|a| a.norm_sqr()).sum();
        let n1: f64 = v1.iter().map(|a| a.norm_sqr()).sum();
        let (keep, other, nk) = if n0 >= n1 { (v0, v1, n0) } else { (v1, v0, n1) };
        if nk < DEGENERATE_NORM {
            return Err(Error::Numerical("state has vanishing norm".into()));
        }
        let overlap: Complex64 = keep.iter().zip(other).map(|(a, b)| a.conj() * b).sum();
        let alpha = overlap / nk;
        let residual: f64 = keep
            .iter()
            .zip(other)
            .map(|(a, b)| (b - alpha * a).norm_sqr())
            .sum();
        if residual > DISENTANGLE_TOL {
            return Err(Error::State(format!(
                "ancilla is entangled with the data register (residual {residual:e})"
            )));
        }
        let scale = nk.sqrt().recip();
        let data: Vec<Complex64> = keep.iter().map(|a| a * scale).collect();
        self.amps = data;
        self.has_ancilla = false;
        Ok(residual)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Statevector) -> Result<f64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::InvalidArgument(format!(
                "fidelity between states of dimension {} and {}",
                self.amps.len(),
                other.amps.len()
            )));
        }
        let ip: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(ip.norm_sqr())
    }

    /// Structured-text dump of the amplitudes, for fixtures and debugging.
    pub fn dump_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump {
            num_data: usize,
            has_ancilla: bool,
            amps: Vec<[f64; 2]>,
        }
        serde_json::to_string(&Dump {
            num_data: self.num_data,
            has_ancilla: self.has_ancilla,
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        })
        .expect("amplitude dump is infallible")
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Rescales to unit norm; returns the norm² before rescaling.
    pub(crate) fn renormalize(&mut self) -> Result<f64> {
        let norm = self.norm_sqr();
        if !norm.is_finite() || norm < DEGENERATE_NORM {
            return Err(Error::Numerical(format!(
                "cannot renormalize state of norm² {norm:e}"
            )));
        }
        let scale = norm.sqrt().recip();
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(norm)
    }
}
