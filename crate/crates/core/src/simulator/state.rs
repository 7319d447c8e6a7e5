use num_complex::Complex64;
use rand::Rng;

use super::gates::{pauli_matrix, GateOp, Pauli};
use crate::error::{Error, Result};

/// Widest register a circuit may address (16 replicas of a 3-qubit base).
pub const MAX_QUBITS: usize = 48;

/// Widest register that may be materialised as one dense amplitude array.
pub const MAX_DENSE_QUBITS: usize = 24;

/// Dense amplitudes over a subset of the register's qubits. Local bit `k`
/// of an index addresses `qubits[k]`.
#[derive(Debug, Clone, PartialEq)]
struct Block {
    qubits: Vec<usize>,
    amps: Vec<Complex64>,
}

impl Block {
    fn ground(qubit: usize) -> Self {
        Self {
            qubits: vec![qubit],
            amps: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    fn local(&self, qubit: usize) -> usize {
        self.qubits.iter().position(|&q| q == qubit).expect("qubit owned by block")
    }

    fn apply_1q(&mut self, bit: usize, m: &[[Complex64; 2]; 2]) {
        let stride = 1usize << bit;
        for base in (0..self.amps.len()).filter(|i| i & stride == 0) {
            let a = self.amps[base];
            let b = self.amps[base | stride];
            self.amps[base] = m[0][0] * a + m[0][1] * b;
            self.amps[base | stride] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn apply_controlled(&mut self, control: usize, target: usize, m: &[[Complex64; 2]; 2]) {
        let c = 1usize << control;
        let t = 1usize << target;
        for base in (0..self.amps.len()).filter(|i| i & c != 0 && i & t == 0) {
            let a = self.amps[base];
            let b = self.amps[base | t];
            self.amps[base] = m[0][0] * a + m[0][1] * b;
            self.amps[base | t] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn merge(self, other: Block) -> Block {
        let low = self.amps.len();
        let mut amps = Vec::with_capacity(low * other.amps.len());
        for hi in &other.amps {
            for lo in &self.amps {
                amps.push(lo * hi);
            }
        }
        let mut qubits = self.qubits;
        qubits.extend(other.qubits);
        Block { qubits, amps }
    }
}

/// Pure state of an `n_qubits` register.
///
/// The state is stored as a tensor product of dense blocks: qubits start in
/// their own block and blocks are fused only when a two-qubit operation
/// couples them. Replicated circuits whose copies never interact therefore
/// cost `m * 2^N` amplitudes rather than `2^(m N)`. Qubit 0 is the least
/// significant bit of a basis-state index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    blocks: Vec<Block>,
    /// `owner[q]` is the index of the block holding qubit `q`.
    owner: Vec<usize>,
}

/// `|0...0>` on `n_qubits` qubits.
pub fn init_state(n_qubits: usize) -> Result<Statevector> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Size(format!(
            "register width {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(Statevector {
        n_qubits,
        blocks: (0..n_qubits).map(Block::ground).collect(),
        owner: (0..n_qubits).collect(),
    })
}

impl Statevector {
    /// Builds a state from a dense amplitude array (qubit 0 = least
    /// significant bit). The array must have length `2^n_qubits` and unit norm.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Size(format!(
                "dense width {n_qubits} outside 1..={MAX_DENSE_QUBITS}"
            )));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::Size(format!(
                "expected {} amplitudes, got {}",
                1usize << n_qubits,
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!("amplitudes have norm^2 {norm}")));
        }
        Ok(Self {
            n_qubits,
            blocks: vec![Block {
                qubits: (0..n_qubits).collect(),
                amps,
            }],
            owner: vec![0; n_qubits],
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Groups of qubits whose joint state is not known to factorise.
    pub fn blocks(&self) -> impl Iterator<Item = &[usize]> {
        self.blocks.iter().map(|b| b.qubits.as_slice())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::Index(format!(
                "qubit {qubit} out of range for a {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Amplitude of one computational basis state.
    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.blocks.iter().fold(Complex64::new(1.0, 0.0), |acc, b| {
            let local = b
                .qubits
                .iter()
                .enumerate()
                .fold(0usize, |l, (k, &q)| l | ((((index >> q) & 1) as usize) << k));
            acc * b.amps[local]
        })
    }

    /// Dense amplitude array of length `2^n_qubits`.
    pub fn amplitudes(&self) -> Result<Vec<Complex64>> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Size(format!(
                "cannot densify a {}-qubit state (limit {MAX_DENSE_QUBITS})",
                self.n_qubits
            )));
        }
        Ok((0..1u64 << self.n_qubits).map(|i| self.amplitude(i)).collect())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.amps.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .product()
    }

    /// Fuses the blocks holding `a` and `b`; returns the fused block index.
    fn fuse(&mut self, a: usize, b: usize) -> usize {
        let (ia, ib) = (self.owner[a], self.owner[b]);
        if ia == ib {
            return ia;
        }
        let (lo, hi) = if ia < ib { (ia, ib) } else { (ib, ia) };
        let second = self.blocks.remove(hi);
        let first = std::mem::replace(&mut self.blocks[lo], Block { qubits: vec![], amps: vec![] });
        self.blocks[lo] = first.merge(second);
        self.reindex();
        lo
    }

    fn reindex(&mut self) {
        for (i, b) in self.blocks.iter().enumerate() {
            for &q in &b.qubits {
                self.owner[q] = i;
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let m = gate.target_matrix();
        if gate.kind.is_controlled() {
            let (c, t) = (gate.targets[0], gate.targets[1]);
            let bi = self.fuse(c, t);
            let block = &mut self.blocks[bi];
            let (lc, lt) = (block.local(c), block.local(t));
            block.apply_controlled(lc, lt, &m);
        } else {
            self.apply_single(gate.targets[0], &m);
        }
        Ok(())
    }

    fn apply_single(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) {
        let block = &mut self.blocks[self.owner[qubit]];
        let bit = block.local(qubit);
        block.apply_1q(bit, m);
    }

    pub fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) -> Result<()> {
        self.check_qubit(qubit)?;
        if pauli != Pauli::I {
            self.apply_single(qubit, &pauli_matrix(pauli));
        }
        Ok(())
    }

    /// Exact `<Z>` of one qubit.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let block = &self.blocks[self.owner[qubit]];
        let bit = 1usize << block.local(qubit);
        Ok(block
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum())
    }

    /// Precomputes per-block cumulative distributions for repeated sampling.
    pub fn sampler(&self) -> BasisSampler {
        BasisSampler {
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    let mut acc = 0.0;
                    let cdf = b
                        .probabilities()
                        .into_iter()
                        .map(|p| {
                            acc += p;
                            acc
                        })
                        .collect();
                    (b.qubits.clone(), cdf)
                })
                .collect(),
        }
    }
}

/// Draws computational-basis outcomes from a fixed state.
#[derive(Debug, Clone)]
pub struct BasisSampler {
    blocks: Vec<(Vec<usize>, Vec<f64>)>,
}

impl BasisSampler {
    /// One measurement of every qubit; bit `q` of the result is qubit `q`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut out = 0u64;
        for (qubits, cdf) in &self.blocks {
            let total = *cdf.last().expect("non-empty block");
            let u = rng.random::<f64>() * total;
            let local = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            for (k, &q) in qubits.iter().enumerate() {
                out |= (((local >> k) & 1) as u64) << q;
            }
        }
        out
    }
}
