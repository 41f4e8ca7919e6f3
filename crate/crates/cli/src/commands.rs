//! The three subcommands. Each returns a JSON report and whether every
//! selected check passed.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use sheafcode::ccz::{subrank_lower_bound, CczCode, SubrankBudget};
use sheafcode::chain::{distance_bounds, to_alist};
use sheafcode::cup::CupSetup;
use sheafcode::duality::{verify_exactness, verify_h0_ht, verify_poincare};

use crate::config::{distance_budget, ConfigError, Instance, RunConfig, SheafInstance};

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    DdZero,
    Axioms,
    Acyclic,
    Poincare,
    Leibniz,
    Ccz,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::DdZero => "dd-zero",
            Suite::Axioms => "axioms",
            Suite::Acyclic => "acyclic",
            Suite::Poincare => "poincare",
            Suite::Leibniz => "leibniz",
            Suite::Ccz => "ccz",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::DdZero,
                Suite::Axioms,
                Suite::Acyclic,
                Suite::Poincare,
                Suite::Leibniz,
                Suite::Ccz,
            ],
            s => vec![s],
        }
    }
}

/// Outcome of one check. Skipped checks do not fail `all`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
    Skipped,
}

impl Status {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not applicable",
            Status::Skipped => "skipped",
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn write(out: &Path, name: &str, text: &str) -> Result<()> {
    let p = out.join(name);
    fs::write(&p, text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

pub fn build(inst: &Instance, out: Option<&Path>) -> Result<Value> {
    let css = inst.css()?;
    let mut summary = match inst {
        Instance::Sheaf(s) => {
            let cx = s.sheaf.complex();
            json!({
                "kind": if cx.is_cubical() { "cubical" } else { "simplicial" },
                "t": cx.t(),
                "cells": cx.counts(),
                "cochain_dims": s.chain.dims(),
                "level": s.level,
                "n": css.n,
                "k": css.k,
            })
        }
        Instance::Triorthogonal(t) => json!({
            "kind": "triorthogonal",
            "stabilizers": t.stabilizers.len(),
            "logicals": t.logicals.len(),
            "n": css.n,
            "k": css.k,
        }),
    };
    summary["field"] = to_value(&inst.field().spec());
    if let Some(out) = out {
        fs::create_dir_all(out).map_err(|e| ConfigError(format!("{}: {e}", out.display())))?;
        let mut files = Vec::new();
        if let Instance::Sheaf(s) = inst {
            write(out, "complex.json", &pretty(&s.sheaf.complex().to_json()))?;
            write(out, "sheaf.json", &pretty(&s.sheaf.to_json()))?;
            files.extend(["complex.json", "sheaf.json"]);
        }
        write(out, "code.json", &pretty(&css.metadata()))?;
        write(out, "hx.alist", &to_alist(&css.hx))?;
        write(out, "hz.alist", &to_alist(&css.hz))?;
        files.extend(["code.json", "hx.alist", "hz.alist"]);
        if let (Some(code), _) = inst.ccz()? {
            write(out, "gates.txt", &code.form.gate_list())?;
            files.push("gates.txt");
        }
        summary["artifacts"] = json!(files);
    }
    Ok(summary)
}

fn check(name: &str, status: Status, report: Value) -> (Status, Value) {
    (status, json!({ "check": name, "status": status.label(), "report": report }))
}

fn sheaf_only(inst: &Instance) -> Option<&SheafInstance> {
    match inst {
        Instance::Sheaf(s) => Some(s),
        Instance::Triorthogonal(_) => None,
    }
}

fn run_suite(suite: Suite, inst: &Instance, seed: u64, trials: usize) -> Result<(Status, Value)> {
    let name = suite.name();
    let skip = |why: &str| Ok(check(name, Status::Skipped, json!({ "reason": why })));
    match suite {
        Suite::DdZero => {
            let css = inst.css()?;
            let mut report = json!({ "css_commutes": css.commutes() });
            let mut ok = css.commutes();
            if let Some(s) = sheaf_only(inst) {
                let v = s.sheaf.complex().validate();
                let dd = s.chain.check_dd_zero();
                ok &= v.ok() && dd.is_ok();
                report["complex"] = to_value(&v);
                report["coboundary_squares_vanish"] = json!(dd.is_ok());
                if let Err(e) = dd {
                    report["error"] = json!(e.to_string());
                }
            }
            Ok(check(name, Status::from_ok(ok), report))
        }
        Suite::Axioms => {
            let Some(s) = sheaf_only(inst) else { return skip("no sheaf") };
            let rep = s.sheaf.verify_axioms()?;
            Ok(check(name, Status::from_ok(rep.ok()), to_value(&rep)))
        }
        Suite::Acyclic => {
            let Some(s) = sheaf_only(inst) else { return skip("no sheaf") };
            let rep = s.sheaf.is_locally_acyclic()?;
            Ok(check(name, Status::from_ok(rep.ok()), to_value(&rep)))
        }
        Suite::Poincare => {
            let Some(s) = sheaf_only(inst) else { return skip("no sheaf") };
            let h = verify_h0_ht(&s.sheaf)?;
            let p = verify_poincare(&s.sheaf)?;
            let e = verify_exactness(&s.sheaf)?;
            let status = if !p.acyclic {
                Status::NotApplicable
            } else {
                Status::from_ok(h.ok() && p.ok() && e.ok())
            };
            let statements: Value = e
                .statements
                .iter()
                .map(|st| (st.statement.to_string(), json!(st.ok())))
                .collect::<serde_json::Map<_, _>>()
                .into();
            Ok(check(
                name,
                status,
                json!({
                    "h0_ht": to_value(&h),
                    "h0_ht_pass": h.ok(),
                    "duality": to_value(&p),
                    "statements": statements,
                    "long_exact_sequence": e.long_exact.ok(),
                    "exactness": to_value(&e),
                }),
            ))
        }
        Suite::Leibniz => {
            let Some(s) = sheaf_only(inst) else { return skip("no sheaf") };
            if !s.sheaf.complex().is_simplicial() {
                return skip("cup products are defined on simplicial complexes");
            }
            let setup = CupSetup::new(&s.sheaf, &s.sheaf)?;
            let t = s.sheaf.t();
            let mut reports = Vec::new();
            let mut ok = true;
            for i in 0..t {
                for j in 0..t - i {
                    let rep = setup.leibniz_check(i, j, trials, seed)?;
                    ok &= rep.ok();
                    reports.push(to_value(&rep));
                }
            }
            for i in 0..t {
                for j in 1..=t - i {
                    let rep = setup.cocycle_coboundary_check(i, j, trials, seed)?;
                    ok &= rep.ok();
                    reports.push(to_value(&rep));
                }
            }
            Ok(check(name, Status::from_ok(ok), json!({ "checks": reports })))
        }
        Suite::Ccz => {
            let (code, tri) = inst.ccz()?;
            let mut report = json!({});
            let mut ok = true;
            if let Some(tri) = &tri {
                ok &= tri.ok();
                report["triorthogonal"] = to_value(tri);
            }
            match code {
                Some(mut code) => {
                    let cert = code.certify(trials, seed).clone();
                    ok &= cert.ok();
                    report["certification"] = to_value(&cert);
                    report["n_ccz"] = json!(code.form.n_ccz());
                }
                None if tri.is_none() => return skip("no trilinear form for this complex"),
                None => {}
            }
            Ok(check(name, Status::from_ok(ok), report))
        }
        Suite::All => unreachable!("expanded by members()"),
    }
}

/// Runs the suite. The second value is the exit status contract: Some(true)
/// on pass, Some(false) on check failure, None when an explicitly selected
/// suite does not apply.
pub fn verify(inst: &Instance, suite: Suite, seed: u64, trials: usize) -> Result<(Value, Option<bool>)> {
    let mut checks = Vec::new();
    let mut pass = true;
    let mut applied = 0;
    for s in suite.members() {
        let (status, v) = run_suite(s, inst, seed, trials)?;
        match status {
            Status::Pass => applied += 1,
            Status::Skipped => {}
            Status::Fail | Status::NotApplicable => {
                applied += 1;
                pass = false;
            }
        }
        checks.push(v);
    }
    let report = json!({
        "schema": crate::config::SCHEMA,
        "suite": suite.name(),
        "seed": seed,
        "trials": trials,
        "pass": pass && applied > 0,
        "checks": checks,
    });
    let outcome = if applied == 0 { None } else { Some(pass) };
    Ok((report, outcome))
}

fn field(value: Value, provenance: &str) -> Value {
    json!({ "value": value, "provenance": provenance })
}

fn ccz_fields(code: Option<CczCode>, cfg: &RunConfig, seed: u64, trials: usize, k: usize) -> Value {
    let zero = || {
        json!({
            "n_ccz": field(json!(0), "exact"),
            "w_ccz": field(json!(0), "exact"),
            "k_ccz_lb": field(json!(0), "exact"),
        })
    };
    let Some(mut code) = code else {
        let mut v = zero();
        v["note"] = json!("no trilinear form for this instance");
        return v;
    };
    if k == 0 {
        let mut v = zero();
        v["note"] = json!("k = 0: no logical qudits");
        return v;
    }
    let cert = code.certify(trials, seed).clone();
    let certification = json!({
        "passed": cert.passed,
        "failed": cert.failed,
        "trials": cert.trials,
        "seed": cert.seed,
        "mode": cert.mode,
    });
    if !cert.ok() {
        return json!({
            "n_ccz": field(Value::Null, "uncertified"),
            "w_ccz": field(Value::Null, "uncertified"),
            "k_ccz_lb": field(Value::Null, "uncertified"),
            "certification": certification,
        });
    }
    let t = code.build_t();
    let budget = SubrankBudget {
        restarts: cfg.caps.subrank_restarts,
        seed,
    };
    let sub = subrank_lower_bound(code.form.field(), &t, &budget);
    let mut lb = field(json!(sub.r), if sub.exact { "exact" } else { "bound" });
    lb["seed"] = json!(seed);
    lb["restarts"] = json!(budget.restarts);
    json!({
        "n_ccz": field(json!(code.form.n_ccz()), "exact"),
        "w_ccz": field(json!(code.form.w_ccz()), "exact"),
        "k_ccz_lb": lb,
        "certification": certification,
    })
}

pub fn params(inst: &Instance, cfg: &RunConfig, seed: u64, trials: usize) -> Result<Value> {
    let css = inst.css()?;
    let mut out = json!({
        "schema": crate::config::SCHEMA,
        "n": field(json!(css.n), "exact"),
        "k": field(json!(css.k), "exact"),
    });
    let d_upper;
    if css.k == 0 {
        out["d_exact"] = field(json!("∞"), "exact");
        out["d_upper"] = field(json!("∞"), "exact");
        d_upper = None;
    } else {
        let budget = distance_budget(cfg, seed);
        let d = distance_bounds(&css, &budget)?;
        out["d_exact"] = match d.d_exact {
            Some(w) => field(json!(w), "exact"),
            None => field(Value::Null, "bound"),
        };
        let mut du = field(json!(d.d_upper), if d.d_exact.is_some() { "exact" } else { "bound" });
        du["seed"] = json!(seed);
        du["trials"] = json!(budget.trials);
        du["weight_convention"] = json!(d.weight_convention);
        out["d_upper"] = du;
        d_upper = d.d_upper;
    }
    let (code, _) = inst.ccz()?;
    let ccz = ccz_fields(code, cfg, seed, trials, css.k);
    let gamma = match (ccz["n_ccz"]["value"].as_u64(), ccz["k_ccz_lb"]["value"].as_u64(), d_upper) {
        (Some(n), Some(k), Some(d)) if n > 0 && k > 0 && d > 1 => {
            json!(((n as f64) / (k as f64)).ln() / (d as f64).ln())
        }
        _ => Value::Null,
    };
    let gamma_prov = if ccz["n_ccz"]["provenance"] == "uncertified" { "uncertified" } else { "bound" };
    for key in ["n_ccz", "w_ccz", "k_ccz_lb", "certification", "note"] {
        if let Some(v) = ccz.get(key) {
            out[key] = v.clone();
        }
    }
    out["gamma_estimate"] = field(gamma, gamma_prov);
    Ok(out)
}
