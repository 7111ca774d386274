use std::path::Path;

use abel_core::centers::{return_map, universal_check, AbelEquation, UniversalVerdict};
use abel_core::composition::{default_kmax, moments, pcc_check, EndpointHypothesis};
use abel_core::darboux::{
    bivariate, generate_master, ggs_pipeline, lie_derivative_numerator, verify_first_integral,
    DarbouxIntegral, Foliation, GgsOptions,
};
use abel_core::exactpoly::{format_rational, int, parse_rational, Poly};
use abel_core::iterint::{iterated_integral, Interval, Word};
use abel_core::melnikov::{certify_m1_zero, melnikov1, melnikov2, CrossTermSign, M2Options, PerturbedAbel};
use abel_core::numeric::{transport, NumericConfig};
use abel_core::{Error, Rational};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Command, IntervalArg};

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum Cross {
    Negative,
    Positive,
}

/// Deterministic in the inputs: no timings, no thread counts.
#[derive(Serialize)]
pub struct Certificate {
    pub command: &'static str,
    pub version: &'static str,
    pub inputs_sha256: String,
    pub verdict: String,
    pub witness: Value,
}

/// Hashes every input in the order it is consumed.
struct Inputs {
    command: &'static str,
    hasher: Sha256,
}

impl Inputs {
    fn new(command: &'static str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update([0]);
        Inputs { command, hasher }
    }

    fn scalar(&mut self, name: &str, value: impl std::fmt::Display) {
        self.hasher.update(format!("{name}={value}").as_bytes());
        self.hasher.update([0]);
    }

    fn json<T: DeserializeOwned>(&mut self, name: &str, text: &[u8], origin: &str) -> Result<T, Failure> {
        self.hasher.update(format!("{name}:{}:", text.len()).as_bytes());
        self.hasher.update(text);
        self.hasher.update([0]);
        serde_json::from_slice(text).map_err(|e| Failure::Input(format!("{origin}: {e}")))
    }

    fn file<T: DeserializeOwned>(&mut self, name: &str, path: &Path) -> Result<T, Failure> {
        let text = std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.json(name, &text, &path.display().to_string())
    }

    fn interval(&mut self, arg: &IntervalArg) -> Result<Interval, Failure> {
        let iv = match &arg.interval {
            None => Interval::new(int(0), int(1)),
            Some(ends) => {
                let parse = |s: &str| parse_rational(s).map_err(Failure::from);
                Interval::new(parse(&ends[0])?, parse(&ends[1])?)
            }
        };
        self.scalar("interval", format!("{},{}", format_rational(&iv.x0), format_rational(&iv.x1)));
        Ok(iv)
    }

    fn finish(self, verdict: String, witness: Value) -> Certificate {
        Certificate {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            inputs_sha256: hex::encode(self.hasher.finalize()),
            verdict,
            witness,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize")
}

fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect())
}

pub fn run(cmd: &Command) -> Result<Certificate, Failure> {
    match cmd {
        Command::Coeffs { eq, order } => coeffs(eq, *order),
        Command::Universal { eq, max_length, max_weight } => universal(eq, *max_length, *max_weight),
        Command::Decompose { p, q, interval } => decompose(p, q, interval),
        Command::Moments { q, a, kmax, interval } => moment_check(q, a, *kmax, interval),
        Command::Melnikov { sys, order, kmax, force, cross } => melnikov(sys, *order, *kmax, *force, *cross),
        Command::VerifyIntegral { fol, h } => verify_integral(fol, h),
        Command::GenerateMaster { k, r } => master(*k, r.as_deref()),
        Command::Ggs { order, max_length, y0, tol } => ggs(*order, *max_length, *y0, *tol),
        Command::Transport { eq, y0, tol } => numeric_transport(eq, *y0, *tol),
        Command::Iterint { word, interval } => iterint(word, interval),
    }
}

fn coeffs(path: &Path, order: usize) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("coeffs");
    let eq: AbelEquation = inputs.file("eq", path)?;
    inputs.scalar("order", order);
    if order == 0 {
        return Err(Failure::Input("--order must be at least 1".into()));
    }
    let phi = return_map(&eq, order, true)?;
    let (verdict, first) = match phi.first_nonzero() {
        None => (format!("center up to order {order}"), Value::Null),
        Some((n, c)) => (
            format!("focus: c_{n} = {}", format_rational(&c)),
            json!({ "n": n, "value": format_rational(&c) }),
        ),
    };
    let witness = json!({ "coefficients": rationals(&phi.coefficients), "first_nonzero": first });
    Ok(inputs.finish(verdict, witness))
}

fn universal(path: &Path, max_length: usize, max_weight: Option<usize>) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("universal");
    let eq: AbelEquation = inputs.file("eq", path)?;
    inputs.scalar("L", max_length);
    inputs.scalar("max_weight", format!("{max_weight:?}"));
    let v = universal_check(&eq, max_length, max_weight);
    let verdict = match &v {
        UniversalVerdict::UniversalUpTo { max_length, .. } => format!("universal up to word length {max_length}"),
        UniversalVerdict::NotUniversal { word, value } => {
            format!("not universal: word {word:?} integrates to {}", format_rational(value))
        }
    };
    Ok(inputs.finish(verdict, to_value(&v)))
}

fn decompose(p: &Path, q: &Path, interval: &IntervalArg) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("decompose");
    let p: Poly = inputs.file("P", p)?;
    let q: Poly = inputs.file("Q", q)?;
    let iv = inputs.interval(interval)?;
    let v = pcc_check(&p, &q, &iv);
    let verdict = if v.holds() { "PCC" } else { "NoPCC" };
    Ok(inputs.finish(verdict.into(), to_value(&v)))
}

fn moment_check(q: &Path, a: &Path, kmax: Option<usize>, interval: &IntervalArg) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("moments");
    let q: Poly = inputs.file("q", q)?;
    let big_a: Poly = inputs.file("A", a)?;
    let iv = inputs.interval(interval)?;
    let kmax = kmax.unwrap_or_else(|| default_kmax(&q, &big_a));
    inputs.scalar("k", kmax);
    let m = moments(&q, &big_a, &iv, kmax);
    let zero = int(0);
    let first = m.iter().position(|v| *v != zero);
    let pcc = pcc_check(&q.integrate_from(&iv.x0), &big_a, &iv);
    if pcc.holds() && first.is_some() {
        return Err(Failure::Internal("composition certificate found but a moment is nonzero".into()));
    }
    let verdict = match first {
        Some(k) => format!("moment m_{k} = {} is nonzero", format_rational(&m[k])),
        None if pcc.holds() => format!("moments vanish up to k = {kmax}; composition certificate found"),
        None => format!("moments vanish up to k = {kmax}; no composition certificate"),
    };
    let witness = json!({
        "moments": rationals(&m),
        "first_nonzero": first,
        "composition": to_value(&pcc),
        "endpoint_hypothesis": to_value(&EndpointHypothesis::of(&big_a, &iv)),
    });
    Ok(inputs.finish(verdict, witness))
}

fn melnikov(path: &Path, order: usize, kmax: usize, force: bool, cross: Cross) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("melnikov");
    let sys: PerturbedAbel = inputs.file("sys", path)?;
    inputs.scalar("order", order);
    inputs.scalar("k", kmax);
    match order {
        1 => {
            let m1 = melnikov1(&sys, kmax)?;
            let certificate = certify_m1_zero(&sys).ok();
            let verdict = match (&certificate, m1.is_zero()) {
                (Some(_), _) => "M1 is identically zero (composition certificate)".to_string(),
                (None, true) => format!("M1 vanishes up to k = {kmax}; no composition certificate"),
                (None, false) => "M1 is nonzero".to_string(),
            };
            let witness = json!({ "series": to_value(&m1), "certificate": to_value(&certificate) });
            Ok(inputs.finish(verdict, witness))
        }
        2 => {
            inputs.scalar("force", force);
            let cross = match cross {
                Cross::Negative => CrossTermSign::Negative,
                Cross::Positive => CrossTermSign::Positive,
            };
            inputs.scalar("cross", format!("{cross:?}"));
            let m2 = melnikov2(&sys, kmax, M2Options { force, cross }).map_err(|e| match e {
                Error::M1NotZero(msg) => {
                    Failure::Input(format!("first order is not certified zero ({msg}); pass --force to expand anyway"))
                }
                e => e.into(),
            })?;
            let verdict = if m2.series.is_zero() {
                format!("M2 vanishes up to k = {kmax}")
            } else {
                "M2 is nonzero".to_string()
            };
            Ok(inputs.finish(verdict, to_value(&m2)))
        }
        n => Err(Failure::Input(format!("--order must be 1 or 2, got {n}"))),
    }
}

fn verify_integral(fol: &Path, h: &Path) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("verify-integral");
    let fol: Foliation = inputs.file("fol", fol)?;
    let fol = Foliation::new(fol.p, fol.q)?;
    let h: DarbouxIntegral = inputs.file("H", h)?;
    let h = DarbouxIntegral::new(h.factors.into_iter().map(|f| (f.f, f.exponent)).collect())?;
    if verify_first_integral(&fol, &h) {
        return Ok(inputs.finish("first integral".into(), Value::Null));
    }
    let residual = bivariate::serialize(&lie_derivative_numerator(&fol, &h), serde_json::value::Serializer)
        .expect("series serializes");
    Ok(inputs.finish("not a first integral".into(), json!({ "residual": residual })))
}

fn master(k: u32, r: Option<&Path>) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("generate-master");
    inputs.scalar("k", k);
    let r: Poly = match r {
        Some(path) => inputs.file("r", path)?,
        None => Poly::x(),
    };
    inputs.scalar("r", format!("{r}"));
    let m = generate_master(k, &r)?;
    Ok(inputs.finish(format!("master system k = {k} with verified first integral"), to_value(&m)))
}

fn ggs(order: usize, max_length: usize, y0: f64, tol: f64) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("ggs");
    inputs.scalar("order", order);
    inputs.scalar("L", max_length);
    inputs.scalar("y0", y0);
    inputs.scalar("tol", tol);
    if !(y0.is_finite() && y0 != 0.0 && tol.is_finite() && tol > 0.0) {
        return Err(Failure::Input("--y0 must be finite and nonzero, --tol finite and positive".into()));
    }
    let cert = ggs_pipeline(&GgsOptions { order, max_word_length: max_length, y0, tolerance: tol })?;
    let verdict = format!("center up to order {order}, not universal, no composition factor");
    Ok(inputs.finish(verdict, to_value(&cert)))
}

fn numeric_transport(path: &Path, y0: f64, tol: Option<f64>) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("transport");
    let eq: AbelEquation = inputs.file("eq", path)?;
    inputs.scalar("y0", y0);
    inputs.scalar("tol", format!("{tol:?}"));
    let cfg = match tol {
        Some(t) if t.is_finite() && t > 0.0 => NumericConfig::with_tol(t),
        Some(t) => return Err(Failure::Input(format!("--tol must be positive, got {t}"))),
        None => NumericConfig::default(),
    };
    if !y0.is_finite() {
        return Err(Failure::Input("--y0 must be finite".into()));
    }
    let tolerances = json!({ "abs_tol": cfg.abs_tol, "rel_tol": cfg.rel_tol });
    match transport(&eq, y0, &cfg) {
        Ok(y1) => Ok(inputs.finish(
            format!("y(x1) ≈ {y1:e}"),
            json!({ "approximate": true, "y0": y0, "y1": y1, "tolerances": tolerances }),
        )),
        // escaping solutions are a property of the equation, not a failure
        Err(Error::BlowUp { x }) => Ok(inputs.finish(
            format!("solution blows up near x ≈ {x:e}"),
            json!({ "approximate": true, "y0": y0, "blow_up_x": x, "tolerances": tolerances }),
        )),
        Err(e) => Err(e.into()),
    }
}

fn iterint(word: &str, interval: &IntervalArg) -> Result<Certificate, Failure> {
    let mut inputs = Inputs::new("iterint");
    let forms: Vec<Poly> = inputs.json("word", word.as_bytes(), "--word")?;
    let iv = inputs.interval(interval)?;
    let value = iterated_integral(&Word::new(forms), &iv);
    Ok(inputs.finish(format_rational(&value), json!({ "value": format_rational(&value) })))
}
