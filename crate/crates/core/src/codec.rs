//! Rate-1/2 feedforward convolutional code with a log-domain BCJR decoder.
//!
//! Generator masks are read with bit `j` as the coefficient of `D^j`, so
//! bit 0 taps the current input and bit `memory` the oldest stored input.
//! The default code is the 4-state `(7, 5)` code.
//!
//! L-values follow the `ln(P(bit = 0) / P(bit = 1))` convention throughout:
//! a positive L-value favours bit 0, which BPSK maps to `+1.0`.

use std::fmt;

use crate::error::{Error, Result};

/// Magnitude at which decoder posteriors are clamped.
pub const LLR_CLAMP: f64 = 50.0;

/// Branch penalty applied to the hypothesis contradicting an infinite prior.
const FROZEN_PENALTY: f64 = -1e9;

/// Parameters of a rate-1/2 feedforward convolutional code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeSpec {
    memory: u32,
    generators: [u32; 2],
    terminated: bool,
}

impl CodeSpec {
    /// Largest supported number of delay elements.
    pub const MAX_MEMORY: u32 = 16;

    pub fn new(memory: u32, generators: [u32; 2], terminated: bool) -> Result<Self> {
        if !(1..=Self::MAX_MEMORY).contains(&memory) {
            return Err(Error::InvalidSpec(format!(
                "memory must be in 1..={}, got {memory}",
                Self::MAX_MEMORY
            )));
        }
        let width_mask = (1u32 << (memory + 1)) - 1;
        for (i, &g) in generators.iter().enumerate() {
            if g == 0 {
                return Err(Error::InvalidSpec(format!("generator {i} is zero")));
            }
            if g & !width_mask != 0 {
                return Err(Error::InvalidSpec(format!(
                    "generator {i} ({g:o} octal) is wider than memory + 1 = {} bits",
                    memory + 1
                )));
            }
        }
        if generators.iter().all(|g| g & 1 == 0) {
            return Err(Error::InvalidSpec(
                "no generator taps the current input".to_string(),
            ));
        }
        Ok(Self {
            memory,
            generators,
            terminated,
        })
    }

    /// Parses octal generator strings such as `["7", "5"]`.
    pub fn from_octal(memory: u32, generators: [&str; 2], terminated: bool) -> Result<Self> {
        let parse = |s: &str| {
            u32::from_str_radix(s.trim(), 8)
                .map_err(|_| Error::InvalidSpec(format!("`{s}` is not an octal generator")))
        };
        Self::new(
            memory,
            [parse(generators[0])?, parse(generators[1])?],
            terminated,
        )
    }

    pub fn memory(&self) -> u32 {
        self.memory
    }

    pub fn generators(&self) -> [u32; 2] {
        self.generators
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory
    }

    /// Number of trellis steps that carry tail bits.
    pub fn tail_len(&self) -> usize {
        if self.terminated {
            self.memory as usize
        } else {
            0
        }
    }

    /// Coded length for `info_len` information bits.
    pub fn coded_len(&self, info_len: usize) -> usize {
        2 * (info_len + self.tail_len())
    }

    /// Generators as comma-separated octal, e.g. `7,5`.
    pub fn generators_octal(&self) -> String {
        format!("{:o},{:o}", self.generators[0], self.generators[1])
    }
}

impl Default for CodeSpec {
    fn default() -> Self {
        Self {
            memory: 2,
            generators: [0o7, 0o5],
            terminated: true,
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "memory={} generators={} terminated={}",
            self.memory,
            self.generators_octal(),
            self.terminated
        )
    }
}

/// One trellis edge leaving a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub next: usize,
    pub output: [u8; 2],
}

/// State-transition table of a [`CodeSpec`].
///
/// State `s` holds the last `memory` inputs with bit 0 the most recent.
#[derive(Debug, Clone)]
pub struct Trellis {
    spec: CodeSpec,
    /// Indexed by `2 * state + input`.
    edges: Vec<Edge>,
}

pub fn build_trellis(spec: CodeSpec) -> Trellis {
    let states = spec.num_states();
    let state_mask = states - 1;
    let mut edges = Vec::with_capacity(2 * states);
    for state in 0..states {
        for input in 0..2usize {
            let register = (input | (state << 1)) as u32;
            let output = spec
                .generators
                .map(|g| ((register & g).count_ones() & 1) as u8);
            edges.push(Edge {
                next: register as usize & state_mask,
                output,
            });
        }
    }
    Trellis { spec, edges }
}

impl Trellis {
    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn num_states(&self) -> usize {
        self.spec.num_states()
    }

    pub fn edge(&self, state: usize, input: u8) -> Edge {
        self.edges[2 * state + input as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, u8, Edge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (i / 2, (i % 2) as u8, e))
    }

    /// Encodes `info`, appending the zero tail when the code is terminated.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut out = Vec::with_capacity(self.spec.coded_len(info.len()));
        let mut state = 0;
        let tail = std::iter::repeat_n(0u8, self.spec.tail_len());
        for bit in info.iter().map(|&b| b & 1).chain(tail) {
            let edge = self.edge(state, bit);
            out.extend_from_slice(&edge.output);
            state = edge.next;
        }
        Ok(out)
    }

    /// BCJR forward-backward decoding with exact log-sum (max-star) arithmetic.
    ///
    /// `channel_llr` carries two L-values per trellis step, tail included.
    /// `apriori_llr` carries one L-value per information bit; an infinite
    /// entry pins that bit to the sign of the infinity. Posteriors are
    /// clamped to [`LLR_CLAMP`] and tail bits are not returned.
    pub fn decode_map(&self, channel_llr: &[f64], apriori_llr: &[f64]) -> Result<SoftWord> {
        let info_len = apriori_llr.len();
        let expected = self.spec.coded_len(info_len);
        if channel_llr.len() != expected || info_len == 0 {
            return Err(Error::LengthMismatch {
                expected,
                actual: channel_llr.len(),
            });
        }
        let steps = info_len + self.spec.tail_len();
        let states = self.num_states();

        // Branch metric for each (step, input, output pair) packed as
        // gammas[4 * k + 2 * c0 + c1] plus a per-input prior term.
        let mut code_metric = vec![0.0f64; 4 * steps];
        for k in 0..steps {
            let l0 = 0.5 * channel_llr[2 * k];
            let l1 = 0.5 * channel_llr[2 * k + 1];
            code_metric[4 * k] = l0 + l1;
            code_metric[4 * k + 1] = l0 - l1;
            code_metric[4 * k + 2] = -l0 + l1;
            code_metric[4 * k + 3] = -l0 - l1;
        }
        let prior_metric = |k: usize, input: u8| -> f64 {
            if k >= info_len {
                // Zero tail: a one can never be sent here.
                return if input == 0 { 0.0 } else { f64::NEG_INFINITY };
            }
            let la = apriori_llr[k];
            if la.is_infinite() {
                let asserted = u8::from(la < 0.0);
                if input == asserted {
                    0.0
                } else {
                    FROZEN_PENALTY
                }
            } else if input == 0 {
                0.5 * la
            } else {
                -0.5 * la
            }
        };
        let gamma = |k: usize, input: u8, edge: &Edge| -> f64 {
            let idx = 4 * k + 2 * edge.output[0] as usize + edge.output[1] as usize;
            code_metric[idx] + prior_metric(k, input)
        };

        let mut alpha = vec![f64::NEG_INFINITY; (steps + 1) * states];
        alpha[0] = 0.0;
        for k in 0..steps {
            let (cur, next) = alpha.split_at_mut((k + 1) * states);
            let cur = &cur[k * states..];
            let next = &mut next[..states];
            for (s, &a) in cur.iter().enumerate() {
                if a == f64::NEG_INFINITY {
                    continue;
                }
                for input in 0..2u8 {
                    let edge = self.edge(s, input);
                    let m = a + gamma(k, input, &edge);
                    next[edge.next] = max_star(next[edge.next], m);
                }
            }
            normalize(next);
        }

        let mut beta = vec![f64::NEG_INFINITY; (steps + 1) * states];
        if self.spec.terminated {
            beta[steps * states] = 0.0;
        } else {
            beta[steps * states..].fill(0.0);
        }
        for k in (0..steps).rev() {
            let (cur, next) = beta.split_at_mut((k + 1) * states);
            let cur = &mut cur[k * states..];
            let next = &next[..states];
            for (s, b) in cur.iter_mut().enumerate() {
                let mut acc = f64::NEG_INFINITY;
                for input in 0..2u8 {
                    let edge = self.edge(s, input);
                    let nb = next[edge.next];
                    if nb == f64::NEG_INFINITY {
                        continue;
                    }
                    acc = max_star(acc, nb + gamma(k, input, &edge));
                }
                *b = acc;
            }
            normalize(cur);
        }

        let mut llr = Vec::with_capacity(info_len);
        for k in 0..info_len {
            let mut acc = [f64::NEG_INFINITY; 2];
            for s in 0..states {
                let a = alpha[k * states + s];
                if a == f64::NEG_INFINITY {
                    continue;
                }
                for input in 0..2u8 {
                    let edge = self.edge(s, input);
                    let b = beta[(k + 1) * states + edge.next];
                    if b == f64::NEG_INFINITY {
                        continue;
                    }
                    let m = a + gamma(k, input, &edge) + b;
                    acc[input as usize] = max_star(acc[input as usize], m);
                }
            }
            llr.push((acc[0] - acc[1]).clamp(-LLR_CLAMP, LLR_CLAMP));
        }
        Ok(SoftWord::from_llr(llr))
    }
}

pub fn encode(info: &[u8], spec: CodeSpec) -> Result<Vec<u8>> {
    build_trellis(spec).encode(info)
}

pub fn decode_map(channel_llr: &[f64], apriori_llr: &[f64], spec: CodeSpec) -> Result<SoftWord> {
    build_trellis(spec).decode_map(channel_llr, apriori_llr)
}

/// `ln(e^a + e^b)` without overflow.
#[inline]
fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

#[inline]
fn normalize(metrics: &mut [f64]) {
    let top = metrics.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top.is_finite() {
        metrics.iter_mut().for_each(|m| *m -= top);
    }
}

/// Hard decisions paired with their L-values.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftWord {
    bits: Vec<u8>,
    llr: Vec<f64>,
}

impl SoftWord {
    /// Builds a word whose hard decisions are the signs of `llr`; an
    /// L-value of exactly zero decides bit 0.
    pub fn from_llr(llr: Vec<f64>) -> Self {
        let bits = llr.iter().map(|&l| hard_decision(l)).collect();
        Self { bits, llr }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn llr(&self) -> &[f64] {
        &self.llr
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn into_llr(self) -> Vec<f64> {
        self.llr
    }
}

#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    if llr >= 0.0 {
        0
    } else {
        1
    }
}
