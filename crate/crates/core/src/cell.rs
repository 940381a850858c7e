//! The Evolvable Neural Unit: a gated recurrent cell with an extra clipped
//! output gate whose output is fed back as input on the next step.
//!
//! Gate input is the concatenation `[h, o_prev, x]` of width `k + c + d`:
//!
//! ```text
//! z  = σ(W_z · [h, o_prev, x])
//! r  = σ(W_r · [h, o_prev, x])
//! h~ = tanh(W_c · [r ⊙ h, o_prev, x])
//! h' = (1 - z) ⊙ h + z ⊙ h~
//! o  = clip(W_o · h' + ε, 0, 1)
//! ```
//!
//! There are no bias terms. Weights are shared by every instance of a role
//! (all synapses, all neurons); each instance owns its [`EnuState`].

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::StreamRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EnuDims {
    memory: usize,
    output: usize,
    input: usize,
}

impl EnuDims {
    pub fn new(memory: usize, output: usize, input: usize) -> Result<Self> {
        if memory == 0 || output == 0 || input == 0 {
            return Err(Error::config(format!("ENU dims must be positive (k={memory}, c={output}, d={input})")));
        }
        Ok(EnuDims { memory, output, input })
    }

    /// Memory size `k`.
    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Output channel count `c`.
    pub fn output(&self) -> usize {
        self.output
    }

    /// Input channel count `d`.
    pub fn input(&self) -> usize {
        self.input
    }

    /// Gate input width `k + c + d`.
    pub fn width(&self) -> usize {
        self.memory + self.output + self.input
    }

    /// Number of evolvable weights: three `k × width` gates plus `c × k`.
    pub fn param_count(&self) -> usize {
        3 * self.memory * self.width() + self.output * self.memory
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Update,
    Reset,
    Cell,
    Output,
}

/// Gate weights of one chromosome, stored contiguously as
/// `W_z, W_r, W_c, W_o`, each row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct EnuParams<T> {
    dims: EnuDims,
    data: Vec<T>,
}

impl<T: Scalar> EnuParams<T> {
    pub fn zeros(dims: EnuDims) -> Self {
        EnuParams { dims, data: vec![T::zero(); dims.param_count()] }
    }

    /// Independent Gaussian(0, init_std²) weights from a seeded generator.
    pub fn init(dims: EnuDims, seed: u64, init_std: f64) -> Self {
        let mut rng = crate::seed::stream(seed, &[crate::seed::tag::INIT]);
        Self::init_with(dims, &mut rng, init_std)
    }

    pub(crate) fn init_with(dims: EnuDims, rng: &mut StreamRng, init_std: f64) -> Self {
        let data = (0..dims.param_count())
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                T::of(z * init_std)
            })
            .collect();
        EnuParams { dims, data }
    }

    pub fn from_values(dims: EnuDims, values: &[f64]) -> Result<Self> {
        if values.len() != dims.param_count() {
            return Err(Error::layout(format!(
                "expected {} weights for {:?}, got {}",
                dims.param_count(),
                dims,
                values.len()
            )));
        }
        Ok(EnuParams { dims, data: values.iter().map(|&v| T::of(v)).collect() })
    }

    pub fn dims(&self) -> EnuDims {
        self.dims
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.as_f64()).collect()
    }

    pub fn cast<U: Scalar>(&self) -> EnuParams<U> {
        EnuParams { dims: self.dims, data: self.data.iter().map(|v| U::of(v.as_f64())).collect() }
    }

    fn range(&self, gate: Gate) -> std::ops::Range<usize> {
        let gate_len = self.dims.memory * self.dims.width();
        match gate {
            Gate::Update => 0..gate_len,
            Gate::Reset => gate_len..2 * gate_len,
            Gate::Cell => 2 * gate_len..3 * gate_len,
            Gate::Output => 3 * gate_len..self.data.len(),
        }
    }

    /// Row-major weights of one gate (`k × width`, or `c × k` for the output).
    pub fn matrix(&self, gate: Gate) -> &[T] {
        &self.data[self.range(gate)]
    }

    pub fn matrix_mut(&mut self, gate: Gate) -> &mut [T] {
        let r = self.range(gate);
        &mut self.data[r]
    }

    /// Update and reset gates stacked as one `2k × width` matrix.
    fn update_reset(&self) -> &[T] {
        let gate_len = self.dims.memory * self.dims.width();
        &self.data[..2 * gate_len]
    }

    /// Single-instance step, evaluated with straightforward matrix-vector loops.
    pub fn step(&self, state: &EnuState<T>, x: &[T], noise: &mut Noise<'_>) -> Result<(EnuState<T>, Vec<T>)> {
        let EnuDims { memory: k, output: c, input: d } = self.dims;
        if x.len() != d {
            return Err(Error::shape(format!("ENU input has {} channels, expected {d}", x.len())));
        }
        if state.h.len() != k || state.o_prev.len() != c {
            return Err(Error::shape(format!(
                "ENU state is ({}, {}), expected ({k}, {c})",
                state.h.len(),
                state.o_prev.len()
            )));
        }
        let width = self.dims.width();
        let mut input = Vec::with_capacity(width);
        input.extend_from_slice(&state.h);
        input.extend_from_slice(&state.o_prev);
        input.extend_from_slice(x);

        let w_z = self.matrix(Gate::Update);
        let w_r = self.matrix(Gate::Reset);
        let w_c = self.matrix(Gate::Cell);
        let w_o = self.matrix(Gate::Output);

        let z: Vec<T> = (0..k).map(|i| dot(&w_z[i * width..(i + 1) * width], &input).sigmoid()).collect();
        let r: Vec<T> = (0..k).map(|i| dot(&w_r[i * width..(i + 1) * width], &input).sigmoid()).collect();
        for j in 0..k {
            input[j] = r[j] * state.h[j];
        }
        let mut h = Vec::with_capacity(k);
        for i in 0..k {
            let cand = dot(&w_c[i * width..(i + 1) * width], &input).tanh();
            h.push((T::one() - z[i]) * state.h[i] + z[i] * cand);
        }
        let o: Vec<T> = (0..c)
            .map(|i| {
                let pre = dot(&w_o[i * k..(i + 1) * k], &h) + T::of(noise.sample());
                clip_unit(pre)
            })
            .collect();
        Ok((EnuState { h, o_prev: o.clone() }, o))
    }

    /// Advances every instance in `states` by one step using batched matrix
    /// products. `xs` is `len × d`, row-major. Noise is drawn instance-major,
    /// channel-minor, the same order a sequential loop over [`Self::step`]
    /// would consume it.
    pub fn step_batch_in_place(
        &self,
        states: &mut StateBatch<T>,
        xs: &[T],
        noise: &mut Noise<'_>,
        ws: &mut BatchWorkspace<T>,
    ) -> Result<()> {
        let EnuDims { memory: k, output: c, input: d } = self.dims;
        if states.dims != self.dims {
            return Err(Error::shape(format!("state batch dims {:?} != params dims {:?}", states.dims, self.dims)));
        }
        let b = states.len;
        if xs.len() != b * d {
            return Err(Error::shape(format!("batch input has {} values, expected {b}×{d}", xs.len())));
        }
        if b == 0 {
            return Ok(());
        }
        let width = self.dims.width();
        ws.reserve(b, self.dims);

        let x = &mut ws.x[..b * width];
        for i in 0..b {
            let row = &mut x[i * width..(i + 1) * width];
            row[..k].copy_from_slice(&states.h[i * k..(i + 1) * k]);
            row[k..k + c].copy_from_slice(&states.o[i * c..(i + 1) * c]);
            row[k + c..].copy_from_slice(&xs[i * d..(i + 1) * d]);
        }

        // [z | r] = σ(X · [W_z; W_r]ᵀ), b × 2k
        let zr = &mut ws.zr[..b * 2 * k];
        T::gemm(b, width, 2 * k, x, width as isize, 1, self.update_reset(), 1, width as isize, zr, 2 * k as isize, 1);
        T::sigmoid_slice(zr);

        for ((row, zr), h) in x.chunks_exact_mut(width).zip(zr.chunks_exact(2 * k)).zip(states.h.chunks_exact(k)) {
            for ((xv, &r), &hv) in row[..k].iter_mut().zip(&zr[k..]).zip(h) {
                *xv = r * hv;
            }
        }

        let cand = &mut ws.cand[..b * k];
        T::gemm(b, width, k, x, width as isize, 1, self.matrix(Gate::Cell), 1, width as isize, cand, k as isize, 1);
        T::tanh_slice(cand);
        for ((h, cand), zr) in states.h.chunks_exact_mut(k).zip(cand.chunks_exact(k)).zip(zr.chunks_exact(2 * k)) {
            for ((h, &c), &z) in h.iter_mut().zip(cand).zip(&zr[..k]) {
                *h = (T::one() - z) * *h + z * c;
            }
        }

        T::gemm(
            b,
            k,
            c,
            &states.h,
            k as isize,
            1,
            self.matrix(Gate::Output),
            1,
            k as isize,
            &mut states.o,
            c as isize,
            1,
        );
        for o in states.o.iter_mut() {
            *o = clip_unit(*o + T::of(noise.sample()));
        }
        Ok(())
    }

    /// Batched step over owned per-instance states.
    pub fn step_batch(
        &self,
        states: &[EnuState<T>],
        xs: &[Vec<T>],
        noise: &mut Noise<'_>,
    ) -> Result<(Vec<EnuState<T>>, Vec<Vec<T>>)> {
        if states.len() != xs.len() {
            return Err(Error::shape(format!("{} states but {} inputs", states.len(), xs.len())));
        }
        if states.is_empty() {
            return Err(Error::shape("empty batch"));
        }
        let d = self.dims.input;
        let mut flat = Vec::with_capacity(xs.len() * d);
        for (i, x) in xs.iter().enumerate() {
            if x.len() != d {
                return Err(Error::shape(format!("ragged batch: input {i} has {} channels, expected {d}", x.len())));
            }
            flat.extend_from_slice(x);
        }
        let mut batch = StateBatch::from_states(self.dims, states)?;
        let mut ws = BatchWorkspace::default();
        self.step_batch_in_place(&mut batch, &flat, noise, &mut ws)?;
        let new_states = batch.to_states();
        let outputs = new_states.iter().map(|s| s.o_prev.clone()).collect();
        Ok((new_states, outputs))
    }
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
fn clip_unit<T: Scalar>(v: T) -> T {
    // NaN is mapped to 0 so stored outputs stay inside [0, 1].
    if v >= T::one() {
        T::one()
    } else if v > T::zero() {
        v
    } else {
        T::zero()
    }
}

/// Output-gate noise source.
pub enum Noise<'a> {
    Off,
    Gaussian { std: f64, rng: &'a mut StreamRng },
}

impl<'a> Noise<'a> {
    pub fn gaussian(std: f64, rng: &'a mut StreamRng) -> Self {
        if std > 0.0 {
            Noise::Gaussian { std, rng }
        } else {
            Noise::Off
        }
    }

    #[inline]
    fn sample(&mut self) -> f64 {
        match self {
            Noise::Off => 0.0,
            Noise::Gaussian { std, rng } => {
                let z: f64 = rng.sample(StandardNormal);
                z * *std
            }
        }
    }
}

/// Per-instance memory `h` and previous output `o_prev`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnuState<T> {
    pub h: Vec<T>,
    pub o_prev: Vec<T>,
}

impl<T: Scalar> EnuState<T> {
    pub fn zeros(dims: EnuDims) -> Self {
        EnuState { h: vec![T::zero(); dims.memory], o_prev: vec![T::zero(); dims.output] }
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().chain(&self.o_prev).all(|v| *v == T::zero())
    }
}

/// Structure-of-arrays states for `len` instances sharing one set of dims.
#[derive(Clone, Debug, PartialEq)]
pub struct StateBatch<T> {
    dims: EnuDims,
    len: usize,
    h: Vec<T>,
    o: Vec<T>,
}

impl<T: Scalar> StateBatch<T> {
    pub fn zeros(dims: EnuDims, len: usize) -> Self {
        StateBatch { dims, len, h: vec![T::zero(); len * dims.memory], o: vec![T::zero(); len * dims.output] }
    }

    pub fn from_states(dims: EnuDims, states: &[EnuState<T>]) -> Result<Self> {
        let mut batch = Self::zeros(dims, states.len());
        for (i, s) in states.iter().enumerate() {
            if s.h.len() != dims.memory || s.o_prev.len() != dims.output {
                return Err(Error::shape(format!("state {i} does not match {dims:?}")));
            }
            batch.h[i * dims.memory..(i + 1) * dims.memory].copy_from_slice(&s.h);
            batch.o[i * dims.output..(i + 1) * dims.output].copy_from_slice(&s.o_prev);
        }
        Ok(batch)
    }

    pub fn to_states(&self) -> Vec<EnuState<T>> {
        (0..self.len).map(|i| self.state(i)).collect()
    }

    pub fn state(&self, i: usize) -> EnuState<T> {
        EnuState { h: self.memory(i).to_vec(), o_prev: self.output(i).to_vec() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dims(&self) -> EnuDims {
        self.dims
    }

    pub fn memory(&self, i: usize) -> &[T] {
        &self.h[i * self.dims.memory..(i + 1) * self.dims.memory]
    }

    pub fn output(&self, i: usize) -> &[T] {
        &self.o[i * self.dims.output..(i + 1) * self.dims.output]
    }

    /// All outputs, `len × c` row-major.
    pub fn outputs(&self) -> &[T] {
        &self.o
    }

    pub fn memories(&self) -> &[T] {
        &self.h
    }

    pub fn reset(&mut self) {
        self.h.fill(T::zero());
        self.o.fill(T::zero());
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().chain(&self.o).all(|v| *v == T::zero())
    }
}

/// Scratch buffers reused across batched steps.
#[derive(Clone, Debug, Default)]
pub struct BatchWorkspace<T> {
    x: Vec<T>,
    zr: Vec<T>,
    cand: Vec<T>,
}

impl<T: Scalar> BatchWorkspace<T> {
    fn reserve(&mut self, b: usize, dims: EnuDims) {
        let grow = |v: &mut Vec<T>, n: usize| {
            if v.len() < n {
                v.resize(n, T::zero());
            }
        };
        grow(&mut self.x, b * dims.width());
        grow(&mut self.zr, b * 2 * dims.memory);
        grow(&mut self.cand, b * dims.memory);
    }
}

/// Named chromosome segment of a [`Genome`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chromosome {
    pub name: String,
    pub dims: EnuDims,
}

impl Chromosome {
    pub fn new(name: impl Into<String>, dims: EnuDims) -> Self {
        Chromosome { name: name.into(), dims }
    }
}

/// Flat weight vector covering one or more chromosomes, the unit ES mutates.
#[derive(Clone, Debug, PartialEq)]
pub struct Genome {
    layout: Vec<Chromosome>,
    values: Vec<f64>,
}

pub const GENOME_SCHEMA_VERSION: u32 = 1;

impl Genome {
    pub fn layout_len(layout: &[Chromosome]) -> usize {
        layout.iter().map(|c| c.dims.param_count()).sum()
    }

    pub fn new(layout: Vec<Chromosome>, values: Vec<f64>) -> Result<Self> {
        if layout.is_empty() {
            return Err(Error::layout("genome layout is empty"));
        }
        let expected = Self::layout_len(&layout);
        if values.len() != expected {
            return Err(Error::layout(format!("genome has {} values, layout needs {expected}", values.len())));
        }
        Ok(Genome { layout, values })
    }

    /// Unstructured parameter vector with no chromosome layout, for
    /// optimising plain objectives.
    pub fn flat(values: Vec<f64>) -> Self {
        Genome { layout: Vec::new(), values }
    }

    pub fn zeros(layout: Vec<Chromosome>) -> Result<Self> {
        let n = Self::layout_len(&layout);
        Self::new(layout, vec![0.0; n])
    }

    /// Gaussian initialisation, chromosome by chromosome from one seeded stream.
    pub fn init(layout: Vec<Chromosome>, seed: u64, init_std: f64) -> Result<Self> {
        let mut rng = crate::seed::stream(seed, &[crate::seed::tag::INIT]);
        let mut values = Vec::with_capacity(Self::layout_len(&layout));
        for c in &layout {
            values.extend(EnuParams::<f64>::init_with(c.dims, &mut rng, init_std).data);
        }
        Self::new(layout, values)
    }

    pub fn flatten<T: Scalar>(chromosomes: &[(&str, &EnuParams<T>)]) -> Result<Self> {
        let layout = chromosomes.iter().map(|(n, p)| Chromosome::new(*n, p.dims)).collect();
        let values = chromosomes.iter().flat_map(|(_, p)| p.data.iter().map(|v| v.as_f64())).collect();
        Self::new(layout, values)
    }

    pub fn unflatten<T: Scalar>(&self) -> Result<Vec<EnuParams<T>>> {
        if self.values.len() != Self::layout_len(&self.layout) {
            return Err(Error::layout("genome length does not match its layout"));
        }
        let mut offset = 0;
        self.layout
            .iter()
            .map(|c| {
                let n = c.dims.param_count();
                let p = EnuParams::from_values(c.dims, &self.values[offset..offset + n]);
                offset += n;
                p
            })
            .collect()
    }

    pub fn layout(&self) -> &[Chromosome] {
        &self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same layout, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if self.layout.is_empty() {
            if values.len() != self.values.len() {
                return Err(Error::layout(format!("expected {} values, got {}", self.values.len(), values.len())));
            }
            return Ok(Genome::flat(values));
        }
        Self::new(self.layout.clone(), values)
    }

    /// Fails with a layout error unless `other` describes the same segments.
    pub fn check_layout(&self, layout: &[Chromosome]) -> Result<()> {
        if self.layout != layout {
            return Err(Error::layout(format!(
                "genome layout {:?} does not match expected {:?}",
                describe(&self.layout),
                describe(layout)
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GenomeFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: GenomeFile = serde_json::from_str(s)?;
        file.try_into()
    }
}

fn describe(layout: &[Chromosome]) -> Vec<String> {
    layout.iter().map(|c| format!("{}(k={},c={},d={})", c.name, c.dims.memory, c.dims.output, c.dims.input)).collect()
}

#[derive(Serialize, Deserialize)]
struct LayoutEntry {
    name: String,
    k: usize,
    c: usize,
    d: usize,
}

/// On-disk genome representation.
#[derive(Serialize, Deserialize)]
pub(crate) struct GenomeFile {
    schema_version: u32,
    layout: Vec<LayoutEntry>,
    values: Vec<f64>,
}

impl From<&Genome> for GenomeFile {
    fn from(g: &Genome) -> Self {
        GenomeFile {
            schema_version: GENOME_SCHEMA_VERSION,
            layout: g
                .layout
                .iter()
                .map(|c| LayoutEntry { name: c.name.clone(), k: c.dims.memory, c: c.dims.output, d: c.dims.input })
                .collect(),
            values: g.values.clone(),
        }
    }
}

impl TryFrom<GenomeFile> for Genome {
    type Error = Error;

    fn try_from(f: GenomeFile) -> Result<Self> {
        if f.schema_version != GENOME_SCHEMA_VERSION {
            return Err(Error::layout(format!("unsupported genome schema version {}", f.schema_version)));
        }
        let layout = f
            .layout
            .into_iter()
            .map(|e| Ok(Chromosome::new(e.name, EnuDims::new(e.k, e.c, e.d)?)))
            .collect::<Result<Vec<_>>>()?;
        if layout.is_empty() {
            return Ok(Genome::flat(f.values));
        }
        Genome::new(layout, f.values)
    }
}

impl Serialize for Genome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GenomeFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Genome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GenomeFile::deserialize(d)?;
        Genome::try_from(file).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(k: usize, c: usize, d: usize) -> EnuDims {
        EnuDims::new(k, c, d).unwrap()
    }

    #[test]
    fn dims_reject_zero() {
        assert!(EnuDims::new(0, 1, 1).is_err());
        assert!(EnuDims::new(1, 0, 1).is_err());
        assert!(EnuDims::new(1, 1, 0).is_err());
    }

    #[test]
    fn init_shapes_and_determinism() {
        let d = dims(32, 16, 1);
        let p = EnuParams::<f64>::init(d, 7, 0.1);
        assert_eq!(p.matrix(Gate::Update).len(), 32 * 49);
        assert_eq!(p.matrix(Gate::Reset).len(), 32 * 49);
        assert_eq!(p.matrix(Gate::Cell).len(), 32 * 49);
        assert_eq!(p.matrix(Gate::Output).len(), 16 * 32);
        assert!(p.as_slice().iter().all(|v| v.is_finite()));
        assert_eq!(p, EnuParams::<f64>::init(d, 7, 0.1));
        assert_ne!(p, EnuParams::<f64>::init(d, 8, 0.1));
    }

    #[test]
    fn param_count_matches_matrix_sizes() {
        let d = dims(32, 16, 32);
        let summed = 32 * 80 + 32 * 80 + 32 * 80 + 16 * 32;
        assert_eq!(summed, 8192);
        assert_eq!(d.param_count(), summed);
        assert_eq!(dims(2, 1, 1).param_count(), 26);
    }

    #[test]
    fn zero_weight_step_by_hand() {
        let p = EnuParams::<f64>::zeros(dims(1, 1, 1));
        let s = EnuState { h: vec![0.4], o_prev: vec![0.0] };
        let (next, o) = p.step(&s, &[0.3], &mut Noise::Off).unwrap();
        assert_eq!(next.h, vec![0.2]);
        assert_eq!(o, vec![0.0]);
    }

    #[test]
    fn output_is_clipped_to_one() {
        let mut p = EnuParams::<f64>::zeros(dims(1, 1, 1));
        // drive h towards tanh(·) ≈ 1 then scale by W_o
        p.matrix_mut(Gate::Update)[2] = 50.0;
        p.matrix_mut(Gate::Cell)[2] = 50.0;
        p.matrix_mut(Gate::Output)[0] = 1.7;
        let s = EnuState::zeros(p.dims());
        let (next, o) = p.step(&s, &[1.0], &mut Noise::Off).unwrap();
        assert!((next.h[0] - 1.0).abs() < 1e-12);
        assert_eq!(o, vec![1.0]);
    }

    #[test]
    fn step_rejects_wrong_input_width() {
        let p = EnuParams::<f64>::zeros(dims(2, 1, 3));
        let s = EnuState::zeros(p.dims());
        assert!(matches!(p.step(&s, &[0.0; 2], &mut Noise::Off), Err(Error::Shape(_))));
    }

    #[test]
    fn batch_rejects_ragged_inputs() {
        let p = EnuParams::<f64>::zeros(dims(2, 1, 2));
        let states = vec![EnuState::zeros(p.dims()); 2];
        let xs = vec![vec![0.0, 0.0], vec![0.0]];
        assert!(matches!(p.step_batch(&states, &xs, &mut Noise::Off), Err(Error::Shape(_))));
    }

    #[test]
    fn noisy_step_is_deterministic() {
        let p = EnuParams::<f64>::init(dims(4, 3, 2), 1, 0.5);
        let s = EnuState::zeros(p.dims());
        let run = || {
            let mut rng = crate::seed::stream(11, &[]);
            p.step(&s, &[0.2, 0.7], &mut Noise::gaussian(0.3, &mut rng)).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn genome_round_trip_and_errors() {
        let a = EnuParams::<f64>::init(dims(2, 1, 1), 3, 0.1);
        let b = EnuParams::<f64>::init(dims(3, 2, 2), 4, 0.1);
        let g = Genome::flatten(&[("syn", &a), ("neu", &b)]).unwrap();
        assert_eq!(g.len(), 26 + b.dims().param_count());
        let back = g.unflatten::<f64>().unwrap();
        assert_eq!(back, vec![a, b]);
        assert!(matches!(Genome::new(g.layout().to_vec(), vec![0.0; 3]), Err(Error::Layout(_))));
    }

    #[test]
    fn genome_json_is_exact() {
        let g = Genome::init(vec![Chromosome::new("x", dims(3, 2, 1))], 5, 0.37).unwrap();
        let s = g.to_json().unwrap();
        assert!(s.contains("\"schema_version\":1"));
        assert_eq!(Genome::from_json(&s).unwrap(), g);
    }
}
