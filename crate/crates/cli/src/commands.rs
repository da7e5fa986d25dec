use std::fmt::Write as _;
use std::path::Path;

use torelli_core::coinv::{coinvariants_for, Group, SpaceId};
use torelli_core::homology3::{
    admissible_levels, format_levels, h1_of_splitting, parse_gluing, GroupOrder, LensGluing,
};
use torelli_core::invariants::{phi, phi_lens, r_invariant};
use torelli_core::multilinear::{parse_label, Ext3Basis, Ext3Vector, FormId, FormTable};
use torelli_core::symplectic::{parse_symp_element, Conventions, SpLieElement};
use torelli_core::verify::{all_passed, run_all, run_suite, Suite, VerifyConfig};
use torelli_core::{Error, Result};

/// Command output: the text to print and whether all checks passed.
pub struct Output {
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn new() -> Self {
        Self {
            text: String::new(),
            ok: true,
        }
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key} = {value}");
    }
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))
}

pub fn homology(file: &str, bound: u64) -> Result<Output> {
    let hg = parse_gluing(&read(file)?)?;
    let rep = h1_of_splitting(&hg);
    let mut out = Output::new();
    out.kv("genus", hg.genus());
    let torsion: Vec<String> = rep.torsion.iter().map(|t| t.to_string()).collect();
    out.kv("torsion", format!("[{}]", torsion.join(",")));
    out.kv("free_rank", rep.free_rank);
    match &rep.order {
        GroupOrder::Finite(n) => {
            out.kv("order", n);
            out.kv(
                "admissible_levels",
                format_levels(&admissible_levels(n, bound)?),
            );
        }
        GroupOrder::Infinite => out.kv("order", "infinite"),
    }
    Ok(out)
}

fn required(v: Option<u64>, flag: &str) -> Result<u64> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

pub fn invariant_phi(file: &str, d: Option<u64>) -> Result<Output> {
    let d = required(d, "d")?;
    let x = parse_symp_element(&read(file)?)?;
    let mut out = Output::new();
    out.kv("d", d);
    out.kv("phi", phi(&x, d)?);
    Ok(out)
}

pub fn invariant_r(file: &str, p: Option<u64>) -> Result<Output> {
    let p = required(p, "p")?;
    let x = parse_symp_element(&read(file)?)?;
    let mut out = Output::new();
    out.kv("p", p);
    out.kv("r", r_invariant(&x, p)?);
    Ok(out)
}

pub fn lens(d: i64, k: i64, l: i64, p: Option<u64>) -> Result<Output> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("need d >= 3, got {d}")));
    }
    let lg = LensGluing::new(d, k, l)?;
    let mut out = Output::new();
    out.kv("d", d);
    out.kv("k", k);
    out.kv("l", l);
    out.kv("order", lg.order());
    out.kv("phi", phi_lens(d as u64, k, l)?);
    if let Some(p) = p {
        if p != d as u64 {
            return Err(Error::InvalidParameter(format!(
                "the gluing has level {d}; r needs p = d, got p = {p}"
            )));
        }
        let x = lg.gluing.stabilize(4).reduce(p * p * p)?;
        out.kv("r", r_invariant(&x, p)?);
    }
    Ok(out)
}

pub fn coinv(space: &str, g: usize, p: u64, sl: bool) -> Result<Output> {
    let space: SpaceId = space.parse()?;
    let group = if sl { Group::Sl } else { Group::Gl };
    let r = coinvariants_for(space, group, g, p)?;
    let mut out = Output::new();
    out.kv("space", space);
    out.kv("group", if sl { "sl" } else { "gl" });
    out.kv("g", g);
    out.kv("p", p);
    out.kv("ambient_dimension", r.ambient_dim);
    out.kv("weight_zero_dimension", r.weight_zero_dim);
    out.kv("dimension", r.dimension);
    out.kv("generators_span", r.spans);
    for (i, (name, coords)) in r.candidates.iter().enumerate() {
        let c: Vec<String> = coords.iter().map(u32::to_string).collect();
        out.kv(
            &format!("generator.{}", i + 1),
            format!("{name} [{}]", c.join(",")),
        );
    }
    if let Some(t) = r.trace_factors {
        out.kv("trace_factors", t);
    }
    Ok(out)
}

/// Terms `coef label…`, one per line (or separated by `;` when inline).
fn terms(source: &str) -> Result<Vec<(i64, Vec<String>)>> {
    let text = if Path::new(source).is_file() {
        read(source)?
    } else {
        source.replace(';', "\n")
    };
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let coef = toks[0].parse::<i64>().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("bad coefficient `{}`", toks[0]),
        })?;
        out.push((coef, toks[1..].iter().map(|s| s.to_string()).collect()));
    }
    Ok(out)
}

fn ext3_element(source: &str, basis: &Ext3Basis, p: u64) -> Result<Ext3Vector> {
    let g = basis.genus();
    let mut acc = Ext3Vector::zero(basis, p);
    for (c, labels) in terms(source)? {
        if labels.len() != 3 {
            return Err(Error::InvalidParameter(format!(
                "an ext3 term needs three labels, got {labels:?}"
            )));
        }
        let l: Vec<usize> = labels
            .iter()
            .map(|s| parse_label(g, s))
            .collect::<Result<_>>()?;
        acc = acc.try_add(&Ext3Vector::wedge(basis, p, l[0], l[1], l[2]).scale(c))?;
    }
    Ok(acc)
}

fn sp_element(source: &str, g: usize, p: u64) -> Result<SpLieElement> {
    let names = SpLieElement::basis_labels(g);
    let mut coords = vec![0i64; names.len()];
    for (c, labels) in terms(source)? {
        let [name] = labels.as_slice() else {
            return Err(Error::InvalidParameter(format!(
                "an sp term needs one basis label, got {labels:?}"
            )));
        };
        let i = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown sp basis element `{name}`")))?;
        coords[i] += c;
    }
    let coords: Vec<u64> = coords
        .iter()
        .map(|&c| c.rem_euclid(p as i64) as u64)
        .collect();
    SpLieElement::from_coords(g, p, &coords)
}

pub fn form_eval(form: &str, x: &str, y: &str, g: usize, p: u64) -> Result<Output> {
    let id: FormId = form.parse()?;
    let table = FormTable::new(id, Conventions::default());
    let value = if id.on_sp() {
        table.eval_sp(&sp_element(x, g, p)?, &sp_element(y, g, p)?)?
    } else {
        let basis = Ext3Basis::new(g);
        table.eval_ext3(
            &ext3_element(x, &basis, p)?,
            &ext3_element(y, &basis, p)?,
            &basis,
        )?
    };
    let mut out = Output::new();
    out.kv("form", id);
    out.kv("value", value);
    Ok(out)
}

pub fn verify(suite: &str, g: usize, p: u64, trials: usize, seed: u64) -> Result<Output> {
    let cfg = VerifyConfig::new(g, p, trials, seed);
    let lines = if suite == "all" {
        run_all(&cfg)
    } else {
        run_suite(suite.parse::<Suite>()?, &cfg)
    };
    let mut out = Output::new();
    for l in &lines {
        let _ = writeln!(out.text, "{l}");
    }
    out.ok = all_passed(&lines);
    out.kv("result", if out.ok { "PASS" } else { "FAIL" });
    Ok(out)
}
