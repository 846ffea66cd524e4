//! Half-integer order Bessel functions and the radial kernel `Ω_d`.

use crate::{Error, Result};

/// Below this argument the ascending series is used directly.
const SERIES_CUTOFF: f64 = 2.0;
const SERIES_TERMS: usize = 40;

/// `Γ(ν + 1)` for `ν = j + 1/2`, `j ≥ 0`.
fn gamma_half_plus_one(twice_nu: u32) -> f64 {
    // Γ(3/2) = √π/2, Γ(x+1) = x Γ(x)
    let mut g = std::f64::consts::PI.sqrt() / 2.0;
    let mut x = 1.5;
    while x < twice_nu as f64 / 2.0 + 1.0 - 1e-9 {
        g *= x;
        x += 1.0;
    }
    g
}

fn check_order(twice_nu: u32) -> Result<()> {
    if matches!(twice_nu, 1 | 3 | 5 | 7) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("Bessel order {twice_nu}/2 (supported: 1/2, 3/2, 5/2, 7/2)")))
    }
}

/// `Σ_m (−1)^m (u/2)^{2m} Γ(ν+1) / (m! Γ(m+ν+1))`, i.e. `Γ(ν+1) (2/u)^ν J_ν(u)`.
fn normalized_series(nu: f64, u: f64) -> f64 {
    let q = -0.25 * u * u;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..SERIES_TERMS {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_ν(u)` for `ν = twice_nu / 2 ∈ {1/2, 3/2, 5/2, 7/2}` and `u ≥ 0`.
///
/// Closed forms for orders 1/2 and 3/2, upward recurrence above; the ascending
/// series for `u < 2`, where the recurrence cancels badly.
pub fn bessel_j(twice_nu: u32, u: f64) -> Result<f64> {
    check_order(twice_nu)?;
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!("Bessel argument must be >= 0, got {u}")));
    }
    let nu = twice_nu as f64 / 2.0;
    if u < SERIES_CUTOFF {
        return Ok(normalized_series(nu, u) * (u / 2.0).powf(nu) / gamma_half_plus_one(twice_nu));
    }
    let pre = (2.0 / (std::f64::consts::PI * u)).sqrt();
    let (s, c) = u.sin_cos();
    let mut prev = pre * s;
    let mut cur = pre * (s / u - c);
    let mut order = 1.5;
    if twice_nu == 1 {
        return Ok(prev);
    }
    while order < nu {
        let next = 2.0 * order / u * cur - prev;
        prev = cur;
        cur = next;
        order += 1.0;
    }
    Ok(cur)
}

/// `Ω_d(u) = Γ(d/2) (2/u)^{d/2−1} J_{d/2−1}(u)`: the average of `cos(k·x)` over
/// directions at `|k||x| = u`. Odd `d ∈ {3, 5, 7, 9}`.
pub fn omega_kernel(d: usize, u: f64) -> Result<f64> {
    let twice_nu = match d {
        3 | 5 | 7 | 9 => (d - 2) as u32,
        _ => return Err(Error::Unsupported(format!("Ω_d for d = {d} (supported: 3, 5, 7, 9)"))),
    };
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!("Ω_d argument must be >= 0, got {u}")));
    }
    let nu = twice_nu as f64 / 2.0;
    if u < SERIES_CUTOFF {
        return Ok(normalized_series(nu, u));
    }
    Ok(gamma_half_plus_one(twice_nu) * (2.0 / u).powf(nu) * bessel_j(twice_nu, u)?)
}

/// [`omega_kernel`] for a `d` already validated by the caller.
pub(crate) fn omega_unchecked(d: usize, u: f64) -> f64 {
    omega_kernel(d, u).expect("dimension validated by caller")
}

/// Checks that `d` is a supported odd dimension.
pub fn check_dimension(d: usize) -> Result<()> {
    match d {
        3 | 5 | 7 | 9 => Ok(()),
        _ if d % 2 == 0 => Err(Error::Unsupported(format!("even dimension d = {d}"))),
        _ => Err(Error::Unsupported(format!("dimension d = {d} (supported: 3, 5, 7, 9)"))),
    }
}
