//! Reference implementations that share no code with the library paths
//! they check.
#![allow(dead_code, clippy::needless_range_loop)]

/// Shift-register encoder: bit `j` of a generator taps the input delayed
/// by `j` steps; `memory` zero tail bits are appended.
pub fn shift_register_encode(info: &[u8], memory: usize, gens: [u32; 2]) -> Vec<u8> {
    let mut reg = vec![0u8; memory + 1];
    let mut out = Vec::with_capacity(2 * (info.len() + memory));
    let tail = vec![0u8; memory];
    for &bit in info.iter().chain(&tail) {
        reg.rotate_right(1);
        reg[0] = bit;
        for g in gens {
            let parity = reg
                .iter()
                .enumerate()
                .filter(|(j, _)| (g >> j) & 1 == 1)
                .fold(0u8, |p, (_, &r)| p ^ r);
            out.push(parity);
        }
    }
    out
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Exact per-bit posteriors by summing the likelihood of every codeword.
/// Output is clamped to `clamp` like the decoder's.
pub fn exhaustive_map(
    channel_llr: &[f64],
    apriori_llr: &[f64],
    memory: usize,
    gens: [u32; 2],
    clamp: f64,
) -> Vec<f64> {
    let k = apriori_llr.len();
    let mut by_bit: Vec<[Vec<f64>; 2]> = (0..k).map(|_| [Vec::new(), Vec::new()]).collect();
    for word in 0u32..1 << k {
        let info: Vec<u8> = (0..k).map(|i| ((word >> i) & 1) as u8).collect();
        let code = shift_register_encode(&info, memory, gens);
        let sign = |b: u8| if b == 0 { 1.0 } else { -1.0 };
        let metric: f64 = code
            .iter()
            .zip(channel_llr)
            .map(|(&c, &l)| 0.5 * sign(c) * l)
            .chain(
                info.iter()
                    .zip(apriori_llr)
                    .map(|(&u, &l)| 0.5 * sign(u) * l),
            )
            .sum();
        for (i, &u) in info.iter().enumerate() {
            by_bit[i][u as usize].push(metric);
        }
    }
    by_bit
        .iter()
        .map(|[zero, one]| (log_sum_exp(zero) - log_sum_exp(one)).clamp(-clamp, clamp))
        .collect()
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Probability-domain forward-backward decoder with per-step
/// normalisation, for a terminated code with no a-priori information.
/// Returns hard decisions only.
pub fn probability_bcjr_decisions(channel_llr: &[f64], memory: usize, gens: [u32; 2]) -> Vec<u8> {
    let states = 1usize << memory;
    let steps = channel_llr.len() / 2;
    let k = steps - memory;
    // State holds the last `memory` inputs, most recent in bit 0.
    let step = |s: usize, u: usize| -> (usize, [u8; 2]) {
        let reg = (s << 1) | u;
        let out = gens.map(|g| ((reg as u32 & g).count_ones() & 1) as u8);
        (reg & (states - 1), out)
    };
    let gamma = |t: usize, out: [u8; 2]| -> f64 {
        // P(y | c) up to a constant: exp(L/2) for c = 0, exp(-L/2) for c = 1.
        out.iter()
            .enumerate()
            .map(|(i, &c)| {
                let l = channel_llr[2 * t + i];
                if c == 0 {
                    (0.5 * l).exp()
                } else {
                    (-0.5 * l).exp()
                }
            })
            .product()
    };
    let allowed = |t: usize, u: usize| t < k || u == 0;
    let mut alpha = vec![vec![0.0; states]; steps + 1];
    alpha[0][0] = 1.0;
    for t in 0..steps {
        for s in 0..states {
            for u in 0..2 {
                if allowed(t, u) {
                    let (n, out) = step(s, u);
                    alpha[t + 1][n] += alpha[t][s] * gamma(t, out);
                }
            }
        }
        let z: f64 = alpha[t + 1].iter().sum();
        alpha[t + 1].iter_mut().for_each(|a| *a /= z);
    }
    let mut beta = vec![vec![0.0; states]; steps + 1];
    beta[steps][0] = 1.0;
    for t in (0..steps).rev() {
        for s in 0..states {
            for u in 0..2 {
                if allowed(t, u) {
                    let (n, out) = step(s, u);
                    beta[t][s] += gamma(t, out) * beta[t + 1][n];
                }
            }
        }
        let z: f64 = beta[t].iter().sum();
        beta[t].iter_mut().for_each(|b| *b /= z);
    }
    (0..k)
        .map(|t| {
            let mut p = [0.0; 2];
            for s in 0..states {
                for u in 0..2 {
                    let (n, out) = step(s, u);
                    p[u] += alpha[t][s] * gamma(t, out) * beta[t + 1][n];
                }
            }
            u8::from(p[1] > p[0])
        })
        .collect()
}
