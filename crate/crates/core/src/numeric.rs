//! Floating-point oracle: adaptive Dormand–Prince 5(4) transport and
//! adaptive Gauss–Kronrod quadrature.

use crate::centers::AbelEquation;
use crate::error::{Error, Result};
use num_traits::ToPrimitive;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    /// `|y|` beyond which the solution is declared escaped.
    pub blow_up: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_steps: 1_000_000,
            blow_up: 1e6,
        }
    }
}

impl NumericConfig {
    pub fn with_tol(tol: f64) -> Self {
        NumericConfig {
            abs_tol: tol * 1e-2,
            rel_tol: tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_steps == 0 {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates the scalar ODE `y′ = rhs(x, y)` from `x0` to `x1` (either direction).
pub fn integrate<F>(rhs: F, x0: f64, x1: f64, y0: f64, cfg: &NumericConfig) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    cfg.validate()?;
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = dir * (span.abs() * 1e-3).max(1e-12);
    let mut k = [0.0; 7];
    k[0] = rhs(x, y);
    let mut steps = 0;
    while (x1 - x) * dir > 0.0 {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::MaxSteps(cfg.max_steps));
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        for s in 1..7 {
            let yi = y + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            k[s] = rhs(x + C[s] * h, yi);
        }
        let y5 = y + h * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
        let y4 = y + h * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
        let scale = cfg.abs_tol + cfg.rel_tol * y.abs().max(y5.abs());
        let err = ((y5 - y4) / scale).abs();
        if !y5.is_finite() || y5.abs() > cfg.blow_up {
            if h.abs() < 1e-14 * x.abs().max(1.0) || !y5.is_finite() && h.abs() < 1e-10 {
                return Err(Error::BlowUp { x });
            }
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            x += h;
            y = y5;
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-15 * x.abs().max(1.0) {
            return Err(Error::BlowUp { x });
        }
    }
    Ok(y)
}

/// `y(x1)` for the solution of the Abel equation with `y(x0) = y0`.
pub fn transport(eq: &AbelEquation, y0: f64, cfg: &NumericConfig) -> Result<f64> {
    transport_between(eq, f64_of(&eq.interval().x0), f64_of(&eq.interval().x1), y0, cfg)
}

/// Transport between arbitrary abscissae.
pub fn transport_between(eq: &AbelEquation, x0: f64, x1: f64, y0: f64, cfg: &NumericConfig) -> Result<f64> {
    let species: Vec<Vec<f64>> = eq.species().iter().map(|p| p.to_f64_coeffs()).collect();
    let rhs = |x: f64, y: f64| {
        // dy/dx = −Σ aᵢ(x) y^{i+1}, i ≥ 1
        let mut acc = 0.0;
        for a in species.iter().rev() {
            acc = (acc + horner(a, x)) * y;
        }
        -acc * y
    };
    integrate(rhs, x0, x1, y0, cfg)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn f64_of(r: &crate::exactpoly::Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[allow(clippy::excessive_precision)]
const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const GK_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const G_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for i in 0..7 {
        let s = f(c - r * GK_NODES[i]) + f(c + r * GK_NODES[i]);
        kron += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * s;
        }
    }
    (kron * r, ((kron - gauss) * r).abs())
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature of `f` on `[a, b]`.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32) -> f64 {
        let (val, err) = whole;
        if err <= tol || depth == 0 {
            return val;
        }
        let m = 0.5 * (a + b);
        let left = gk15(f, a, m);
        let right = gk15(f, m, b);
        rec(f, a, m, left, tol * 0.5, depth - 1) + rec(f, m, b, right, tol * 0.5, depth - 1)
    }
    let first = gk15(&f, a, b);
    let tol = abs_tol.max(rel_tol * first.0.abs());
    rec(&f, a, b, first, tol, 40)
}
