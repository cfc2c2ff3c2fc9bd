//! Curve and report JSON.
//!
//! Curves are written as `{"kappa1", "kappa2", "n", "v_hat", "w_hat", "q0"}`
//! with `"-inf"`/`"+inf"` for unbounded curvature and `q0` the initial frame,
//! row-major. The raw form `{"gamma": [[x, y, z], …]}` is also accepted.
//! Every float is printed with 17 significant digits.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::classification::{ClassificationReport, StatusTag};
use crate::curve_model::{curve_from_points, integrate_curve, AdmissibleCurve, ControlPair, CurvatureBounds};
use crate::error::{Error, Result};
use crate::homotopy_engine::{HomotopyPath, ValidationReport};
use crate::sphere_core::{Rotation3, Vec3};
use crate::tolerance::ToleranceProfile;

/// A curvature bound: a number or one of the sentinels `"-inf"`, `"+inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaJson {
    Finite(f64),
    Sentinel(String),
}

impl KappaJson {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Self::Sentinel("+inf".into())
        } else if x == f64::NEG_INFINITY {
            Self::Sentinel("-inf".into())
        } else {
            Self::Finite(x)
        }
    }

    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Self::Finite(x) => Ok(*x),
            Self::Sentinel(s) => match s.trim() {
                "+inf" | "inf" | "∞" | "+∞" => Ok(f64::INFINITY),
                "-inf" | "−inf" | "-∞" | "−∞" => Ok(f64::NEG_INFINITY),
                other => Err(Error::InvalidInput(format!("bad curvature bound {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveJson {
    pub kappa1: KappaJson,
    pub kappa2: KappaJson,
    pub n: usize,
    pub v_hat: Vec<f64>,
    pub w_hat: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
struct RawJson {
    gamma: Vec<[f64; 3]>,
    #[serde(default)]
    kappa1: Option<KappaJson>,
    #[serde(default)]
    kappa2: Option<KappaJson>,
}

pub fn curve_to_json(curve: &AdmissibleCurve) -> CurveJson {
    let b = curve.bounds();
    let c = curve.to_controls();
    let m = curve.frames()[0];
    let q0 = (0..3).flat_map(|r| (0..3).map(move |col| m[(r, col)])).collect();
    CurveJson {
        kappa1: KappaJson::from_f64(b.kappa1),
        kappa2: KappaJson::from_f64(b.kappa2),
        n: c.n,
        v_hat: c.v_hat,
        w_hat: c.w_hat,
        q0: Some(q0),
    }
}

fn bounds_from(k1: Option<&KappaJson>, k2: Option<&KappaJson>) -> Result<CurvatureBounds> {
    let k1 = k1.map_or(Ok(f64::NEG_INFINITY), KappaJson::to_f64)?;
    let k2 = k2.map_or(Ok(f64::INFINITY), KappaJson::to_f64)?;
    CurvatureBounds::new(k1, k2)
}

fn frame_from_row_major(q: &[f64], tol: &ToleranceProfile) -> Result<Rotation3> {
    if q.len() != 9 || q.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("q0 must hold 9 finite numbers".into()));
    }
    let col = |j: usize| Vec3::new(q[j], q[3 + j], q[6 + j]);
    let r = Rotation3::from_columns(&col(0), &col(1), &col(2));
    if !r.is_valid(tol.orthonormal.max(1e-9)) {
        return Err(Error::InvalidInput("q0 is not a rotation".into()));
    }
    Ok(r)
}

impl CurveJson {
    pub fn to_curve(&self, tol: &ToleranceProfile) -> Result<AdmissibleCurve> {
        let bounds = bounds_from(Some(&self.kappa1), Some(&self.kappa2))?;
        let q0 = match &self.q0 {
            Some(q) => frame_from_row_major(q, tol)?,
            None => Rotation3::identity(),
        };
        let controls = ControlPair { n: self.n, v_hat: self.v_hat.clone(), w_hat: self.w_hat.clone() };
        integrate_curve(&controls, bounds, q0)
    }
}

/// Parses either curve form.
pub fn curve_from_value(value: &Value, tol: &ToleranceProfile) -> Result<AdmissibleCurve> {
    if value.get("gamma").is_some() {
        let raw: RawJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::InvalidInput(format!("raw curve: {e}")))?;
        let bounds = bounds_from(raw.kappa1.as_ref(), raw.kappa2.as_ref())?;
        let pts: Vec<Vec3> = raw.gamma.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
        if pts.iter().any(|p| !(p.norm() > 0.0) || !p.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidInput("raw points must be finite and nonzero".into()));
        }
        return curve_from_points(&pts, bounds);
    }
    let cj: CurveJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::InvalidInput(format!("curve: {e}")))?;
    cj.to_curve(tol)
}

pub fn curve_from_str(text: &str, tol: &ToleranceProfile) -> Result<AdmissibleCurve> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("JSON: {e}")))?;
    curve_from_value(&v, tol)
}

/// Formatter writing every float with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Compact JSON text with 17 significant digits per float.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn curve_to_string(curve: &AdmissibleCurve) -> String {
    to_json_string(&curve_to_json(curve))
}

fn tag_name(tag: StatusTag) -> &'static str {
    match tag {
        StatusTag::Condensed => "condensed",
        StatusTag::Diffuse => "diffuse",
        StatusTag::Neither => "neither",
        StatusTag::Both => "both",
        StatusTag::Borderline => "borderline",
    }
}

/// `{"n", "j", "condensed", "nu", "parity", "borderline", "witnesses", …}`.
pub fn classification_json(report: &ClassificationReport) -> Value {
    let d = report.label.diagnostics;
    let s = &report.status;
    let h = s.hemisphere.into_inner();
    let mut witnesses = Map::new();
    witnesses.insert("hemisphere".into(), json!({"pole": [h.x, h.y, h.z], "margin": s.margin}));
    if let Some(a) = s.antipodal {
        witnesses.insert(
            "antipodal".into(),
            json!({"t1": a.t1, "theta1": a.theta1, "t2": a.t2, "theta2": a.theta2, "defect": a.defect}),
        );
    }
    json!({
        "n": report.label.n,
        "j": report.label.j,
        "condensed": d.condensed,
        "diffuse": s.diffuse,
        "status": tag_name(s.tag),
        "nu": d.nu,
        "parity": d.parity.sign(),
        "borderline": d.borderline,
        "kappa0": KappaJson::from_f64(report.kappa0),
        "witnesses": Value::Object(witnesses),
    })
}

pub fn validation_json(v: &ValidationReport) -> Value {
    json!({
        "report": "validation",
        "pass": v.pass,
        "min_margin": v.min_margin,
        "max_closure_defect": v.max_closure_defect,
        "parities": v.parities,
    })
}

/// One curve per line followed by the validation report.
pub fn path_to_jsonl(path: &HomotopyPath, report: &ValidationReport) -> String {
    let mut out = String::new();
    for (s, c) in path.s_values.iter().zip(&path.curves) {
        let mut v = serde_json::to_value(curve_to_json(c)).expect("curve JSON");
        v["s"] = json!(s);
        out.push_str(&to_json_string(&v));
        out.push('\n');
    }
    let mut r = validation_json(report);
    r["provenance"] = serde_json::to_value(path.provenance).expect("provenance");
    r["frames"] = json!(path.len());
    out.push_str(&to_json_string(&r));
    out.push('\n');
    out
}

/// Loads a tolerance profile; missing fields take their defaults.
pub fn tolerance_from_str(text: &str) -> Result<ToleranceProfile> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("tolerance profile: {e}")))
}
