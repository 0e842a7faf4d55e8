//! The per-tensor analysis record: unfolding rank always, and whatever
//! exact or numeric rank information the tensor's field and size admit.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::FieldTag;
use crate::io::scalar_to_json;
use crate::multilinear::{kruskal_certify, rank_a, KruskalCertificate, KruskalRank};
use crate::numeric::{
    border_form_residual, detect_border_rank2, pencil_rank2_test, BorderForm, PencilVerdict,
};
use crate::oracle::{brute_rank, brute_srank, Budget, SrankResult};
use crate::tensor::{reconstruct, tensors_match, Decomposition, SymTensor, Tensor};

/// How a reported value was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Certified,
    Exhaustive,
    Pencil,
    Bound,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Certified => "certified",
            Method::Exhaustive => "exhaustive",
            Method::Pencil => "pencil",
            Method::Bound => "bound",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RankValue {
    pub value: u32,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub struct SrankValue {
    /// None means the tensor is not a sum of symmetric rank-one tensors.
    pub value: Option<u32>,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub struct RankReport {
    pub order: usize,
    pub dim: usize,
    pub field: FieldTag,
    pub rank_a: usize,
    pub rank: Option<RankValue>,
    pub srank: Option<SrankValue>,
    pub brank: Option<RankValue>,
    pub pencil: Option<PencilVerdict>,
    pub border: Option<(BorderForm, f64)>,
    pub kruskal: Option<KruskalCertificate>,
    pub notes: Vec<String>,
}

impl RankReport {
    /// The chain rank A <= (brank <=) rank <= srank must hold whenever the
    /// pieces are present.
    pub fn validate(&self) -> Result<()> {
        let ra = self.rank_a as u32;
        if let Some(r) = &self.rank {
            if r.value < ra {
                return Err(Error::Internal(format!(
                    "rank {} below unfolding rank {ra}",
                    r.value
                )));
            }
            if let Some(SrankValue { value: Some(sv), .. }) = &self.srank {
                if *sv < r.value {
                    return Err(Error::Internal(format!(
                        "srank {sv} below rank {}",
                        r.value
                    )));
                }
            }
            if let Some(b) = &self.brank {
                if b.value < ra || b.value > r.value {
                    return Err(Error::Internal(format!(
                        "brank {} outside [{ra}, {}]",
                        b.value, r.value
                    )));
                }
            }
        } else if let Some(b) = &self.brank {
            if b.value < ra {
                return Err(Error::Internal(format!(
                    "brank {} below unfolding rank {ra}",
                    b.value
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rank_value = |r: &RankValue| json!({"value": r.value, "method": r.method.name()});
        let krank = |k: &KruskalRank| match k {
            KruskalRank::MinusInfinity => json!("-inf"),
            KruskalRank::Finite(v) => json!(v),
        };
        let mut out = json!({
            "shape": {"order": self.order, "dim": self.dim},
            "field": self.field.name(),
            "rank_a": self.rank_a,
        });
        let o = out.as_object_mut().unwrap();
        if let Some(r) = &self.rank {
            o.insert("rank".into(), rank_value(r));
        }
        if let Some(s) = &self.srank {
            o.insert(
                "srank".into(),
                match s.value {
                    Some(v) => json!({"value": v, "method": s.method.name()}),
                    None => json!({"not_expressible": true, "method": s.method.name()}),
                },
            );
        }
        if let Some(b) = &self.brank {
            o.insert("brank".into(), rank_value(b));
        }
        if let Some(p) = &self.pencil {
            o.insert("pencil".into(), serde_json::to_value(p).unwrap());
        }
        if let Some((form, resid)) = &self.border {
            o.insert(
                "border".into(),
                json!({
                    "x": form.x.iter().map(scalar_to_json).collect::<Vec<_>>(),
                    "y": form.y.iter().map(scalar_to_json).collect::<Vec<_>>(),
                    "a": scalar_to_json(&form.a),
                    "b": scalar_to_json(&form.b),
                    "order": form.order,
                    "residual": resid,
                }),
            );
        }
        if let Some(c) = &self.kruskal {
            o.insert(
                "kruskal".into(),
                json!({
                    "r": c.r,
                    "kranks": [krank(&c.kranks.0), krank(&c.kranks.1), krank(&c.kranks.2)],
                    "condition_met": c.condition_met,
                    "unique": c.unique,
                }),
            );
        }
        if !self.notes.is_empty() {
            o.insert("notes".into(), json!(self.notes));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub tol: f64,
    pub budget: Budget,
    /// A decomposition to certify against the input tensor.
    pub certify: Option<Decomposition>,
}

impl Default for AnalyzeOptions {
    fn default() -> AnalyzeOptions {
        AnalyzeOptions { tol: 1e-8, budget: Budget::default(), certify: None }
    }
}

/// Full analysis of one tensor: unfolding rank always; exhaustive rank and
/// symmetric rank over finite fields within budget; pencil and border-form
/// evidence for float tags; a Kruskal certificate when a decomposition is
/// supplied.
pub fn analyze(t: &Tensor, opts: &AnalyzeOptions) -> Result<RankReport> {
    let tag = t.tag();
    let mut report = RankReport {
        order: t.order(),
        dim: t.dim(),
        field: tag,
        rank_a: rank_a(t, Some(opts.tol)),
        rank: None,
        srank: None,
        brank: None,
        pencil: None,
        border: None,
        kruskal: None,
        notes: Vec::new(),
    };
    let symmetric = t.is_symmetric();

    if tag.is_finite() {
        match brute_rank(t, &opts.budget) {
            Ok(r) => {
                report.rank = Some(RankValue { value: r, method: Method::Exhaustive })
            }
            Err(Error::BudgetExceeded(msg)) => report.notes.push(format!("rank skipped: {msg}")),
            Err(e) => return Err(e),
        }
        if symmetric {
            let s = SymTensor::new(t.clone())?;
            match brute_srank(&s, &opts.budget) {
                Ok(SrankResult::Value(v)) => {
                    report.srank = Some(SrankValue { value: Some(v), method: Method::Exhaustive })
                }
                Ok(SrankResult::NotExpressible) => {
                    report.srank = Some(SrankValue { value: None, method: Method::Exhaustive })
                }
                Err(Error::BudgetExceeded(msg)) => {
                    report.notes.push(format!("srank skipped: {msg}"))
                }
                Err(e) => return Err(e),
            }
        }
    }

    if tag.is_float() && symmetric {
        let s = SymTensor::new(t.clone())?;
        if t.order() == 3 && t.dim() == 2 {
            match pencil_rank2_test(&s, crate::numeric::pencil::DEFAULT_PENCIL_TOL) {
                Ok(verdict) => {
                    if verdict.rank_le_2 && report.rank_a == 2 {
                        report.rank = Some(RankValue { value: 2, method: Method::Pencil });
                    } else if !verdict.rank_le_2 && tag == FieldTag::ComplexFloat {
                        // over the complex numbers a binary cubic has rank at
                        // most 3, so a defective pencil pins the rank exactly
                        report.rank = Some(RankValue { value: 3, method: Method::Pencil });
                        report.srank = Some(SrankValue { value: Some(3), method: Method::Bound });
                    }
                    report.pencil = Some(verdict);
                }
                Err(Error::SingularPencil) => {
                    report.notes.push("pencil skipped: no invertible slice mix".into())
                }
                Err(e) => return Err(e),
            }
        }
        if t.order() >= 3 {
            if let Some(form) = detect_border_rank2(&s, opts.tol)? {
                let resid = border_form_residual(&form, t)?;
                report.brank = Some(RankValue { value: 2, method: Method::Pencil });
                report.border = Some((form, resid));
            }
        }
    }

    if let Some(dec) = &opts.certify {
        let back = reconstruct(dec, t.order(), t.dim(), tag)?;
        if !tensors_match(&back, t, opts.tol) {
            return Err(Error::PreconditionFailed(
                "supplied decomposition does not reconstruct the tensor".into(),
            ));
        }
        let cert = kruskal_certify(dec)?;
        if cert.unique {
            let r = cert.r as u32;
            match &report.rank {
                Some(existing) if existing.value != r => {
                    return Err(Error::Internal(format!(
                        "certified rank {r} disagrees with exhaustive rank {}",
                        existing.value
                    )));
                }
                Some(_) => {}
                None => report.rank = Some(RankValue { value: r, method: Method::Certified }),
            }
            if dec.symmetric && report.srank.is_none() {
                report.srank = Some(SrankValue { value: Some(r), method: Method::Certified });
            }
        }
        report.kruskal = Some(cert);
    }

    report.validate()?;
    Ok(report)
}
