#![allow(dead_code)]

use cvqkd::protocol::{ChannelParams, ProtocolKind, ProtocolParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const GRID_SEED: u64 = 0x5eed_c0de;
pub const GRID_SIZE: usize = 200;

/// Fixed pseudo-random parameter tuples: r_A ∈ [0, 3], T ∈ [0.05, 0.999],
/// ε ∈ [0, 0.6], alternating protocol kinds.
pub fn grid() -> Vec<(ProtocolParams, ChannelParams)> {
    let mut rng = StdRng::seed_from_u64(GRID_SEED);
    (0..GRID_SIZE)
        .map(|i| {
            let kind = if i % 2 == 0 {
                ProtocolKind::Coherent
            } else {
                ProtocolKind::Squeezed
            };
            let ra = rng.gen_range(0.0..=3.0);
            let t = rng.gen_range(0.05..=0.999);
            let eps = rng.gen_range(0.0..=0.6);
            (
                ProtocolParams::new(kind, ra, None).unwrap(),
                ChannelParams::new(t, eps).unwrap(),
            )
        })
        .collect()
}

/// Covariance entries written straight from the joint-covariance formula:
/// `(T_A cosh r_A + R_A, T cosh r_A + R cosh r_E, √(T_A T) sinh r_A)` with
/// `R cosh r_E = R + εT`.
pub fn closed_form_cov(p: &ProtocolParams, ch: &ChannelParams) -> (f64, f64, f64) {
    let (ra, ta) = (p.modulation(), p.alice_transmittivity());
    let (t, eps) = (ch.transmission(), ch.excess_noise());
    (
        ta * ra.cosh() + (1.0 - ta),
        t * ra.cosh() + (1.0 - t) + eps * t,
        (ta * t).sqrt() * ra.sinh(),
    )
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// `D(p_AB ‖ p_A p_B)` for a zero-mean bivariate Gaussian, by the trapezoid
/// rule on a box of ±`half_width` standard deviations.
pub fn mutual_information_quadrature(v_a: f64, c: f64, v_b: f64, half_width: f64, n: usize) -> f64 {
    let det = v_a * v_b - c * c;
    let (sa, sb) = (v_a.sqrt(), v_b.sqrt());
    let norm = 1.0 / (2.0 * std::f64::consts::PI * det.sqrt());
    let (ha, hb) = (
        2.0 * half_width * sa / (n - 1) as f64,
        2.0 * half_width * sb / (n - 1) as f64,
    );
    let mut total = 0.0;
    for i in 0..n {
        let x = -half_width * sa + i as f64 * ha;
        let wx = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        for j in 0..n {
            let y = -half_width * sb + j as f64 * hb;
            let wy = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            let q = (v_b * x * x - 2.0 * c * x * y + v_a * y * y) / det;
            let p = norm * (-0.5 * q).exp();
            let log_ratio =
                0.5 * (v_a * v_b / det).ln() - 0.5 * q + 0.5 * (x * x / v_a + y * y / v_b);
            total += wx * wy * p * log_ratio;
        }
    }
    total * ha * hb
}
