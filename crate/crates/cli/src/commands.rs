//! One function per subcommand; each builds a `Report`.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value};

use koszulkit_core::ainfty::{
    check_ainf, check_coainf, dualize_coalgebra, enumerate_augmentations, sign_repair,
    RepairTarget,
};
use koszulkit_core::barcobar::{bar, completed_cobar, counit_map, unit_map, CobarObject};
use koszulkit_core::dsl::{self, SpecDoc};
use koszulkit_core::ground::{cz_and_dim, DimQuery, DualSide};
use koszulkit_core::homology::{quasi_iso, ChainMap};
use koszulkit_core::koszul::{
    induced_map, koszulity_verdict, verify_twist, DgTarget, InducedMap, KoszulVerdict,
    TwistingCochain,
};
use koszulkit_core::ncalg::{find_primitive, normal_form, Element, RewriteRule, Word};
use koszulkit_core::scalars::FieldSpec;

use crate::report::Report;
use crate::{Cli, Command};

struct Loaded {
    doc: SpecDoc,
    raw: String,
}

fn parse_field(s: &str) -> Result<FieldSpec> {
    let s = s.to_ascii_lowercase();
    if s == "q" {
        return Ok(FieldSpec::Rationals);
    }
    if let Some(p) = s.strip_prefix("gf") {
        let p = p.trim_start_matches('(').trim_end_matches(')');
        let p: u64 = p.parse().context("field modulus")?;
        let spec = FieldSpec::PrimeField(p);
        spec.validate().map_err(|e| anyhow!("{}", e))?;
        return Ok(spec);
    }
    bail!("unknown field {} (expected q or gf<p>)", s)
}

fn parse_degrees(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("degree window must look like -6..0"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn load(cli: &Cli) -> Result<Loaded> {
    let (doc, raw) = match (&cli.example, &cli.input) {
        (Some(id), None) => {
            let doc = dsl::load_example(id).map_err(|e| anyhow!("{}", e))?;
            let raw = dsl::serialize(&doc);
            (doc, raw)
        }
        (None, Some(path)) => {
            let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path))?;
            let doc = dsl::parse(&raw, path).map_err(|e| anyhow!("{}: {}", path, e))?;
            (doc, raw)
        }
        (Some(_), Some(_)) => bail!("give either --example or --input, not both"),
        (None, None) => bail!("an input document is required: --example <id> or --input <path>"),
    };
    let doc = match &cli.field {
        None => doc,
        Some(f) => doc.with_field(parse_field(f)?).map_err(|e| anyhow!("{}", e))?,
    };
    Ok(Loaded { doc, raw })
}

fn window_params(cli: &Cli, doc: &SpecDoc, default: (i64, i64, usize)) -> Result<(i64, i64, usize)> {
    let from_doc = doc.window.map(|w| (w.d_min, w.d_max, w.max_len));
    let (mut lo, mut hi, mut len) = from_doc.unwrap_or(default);
    if let Some(d) = &cli.degrees {
        let (a, b) = parse_degrees(d)?;
        lo = a;
        hi = b;
    }
    if let Some(m) = cli.max_len {
        len = m;
    }
    if lo > hi {
        bail!("degree window out of order");
    }
    Ok((lo, hi, len))
}

fn parse_list(s: &Option<String>) -> Result<Vec<i64>> {
    match s {
        None => Ok(Vec::new()),
        Some(s) if s.trim().is_empty() => Ok(Vec::new()),
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| anyhow!("bad integer {}: {}", x, e)))
            .collect(),
    }
}

pub fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::CheckD2 => check_d2(cli),
        Command::CheckAinf { max_arity, repair, budget } => {
            check_ainf_cmd(cli, *max_arity, *repair, *budget)
        }
        Command::CheckCoainf { max_arity, repair, budget } => {
            check_coainf_cmd(cli, *max_arity, *repair, *budget)
        }
        Command::Cobar => cobar_cmd(cli),
        Command::Bar => bar_cmd(cli),
        Command::Dual => dual_cmd(cli),
        Command::Augmentations => augmentations_cmd(cli),
        Command::TwistVerify => twist_verify_cmd(cli),
        Command::Koszul => koszul_cmd(cli),
        Command::Homology => homology_cmd(cli),
        Command::QuasiIso { map } => quasi_iso_cmd(cli, map),
        Command::Primitive { target, degree } => primitive_cmd(cli, target, *degree),
        Command::Rewrite { rules, expr } => rewrite_cmd(cli, rules, expr),
        Command::CubeDemo => cube_demo_cmd(cli),
        Command::Dim { formula, n, punctures, positive, negative, extra, deg, cz, leg } => {
            dim_cmd(cli, formula, *n, punctures, positive, negative, extra, *deg, *cz, *leg)
        }
        Command::Examples => examples_cmd(cli),
    }
}

fn check_d2(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("check-d2", &loaded.raw);
    report.seed = cli.seed;
    let q = doc.quiver();
    let mut ok = true;
    for (g, gs) in q.gens() {
        let img = doc.differential.image_of(g).cloned().unwrap_or_default();
        let dd = doc.differential.apply(&img, q);
        if dd.is_zero() {
            report.line(format!("d²({}) = 0", gs.name));
        } else {
            ok = false;
            report.witness(format!("d²({}) = {}", gs.name, dd.display(q)));
        }
    }
    report.ok = Some(ok);
    Ok(report)
}

fn repair_outcome_lines(report: &mut Report, target: RepairTarget, max_arity: usize, budget: usize) {
    match sign_repair(&target, max_arity, budget) {
        Err(e) => report.line(format!("sign repair: {}", e)),
        Ok(outcome) => match outcome.assignment {
            Some(flips) if flips.is_empty() => {
                report.line("sign repair: input already consistent, empty flip set".to_string())
            }
            Some(flips) => {
                report.line(format!(
                    "sign repair: assignment found after {} subsets",
                    outcome.subsets_tried
                ));
                let mut arr = Vec::new();
                for f in flips {
                    report.line(format!("  flip {} -> {}", f.key, f.word));
                    arr.push(json!({"key": f.key, "word": f.word}));
                }
                report.table("sign_repair", Value::Array(arr));
            }
            None => report.line(format!(
                "sign repair: exhausted the budget after {} subsets",
                outcome.subsets_tried
            )),
        },
    }
}

fn check_ainf_cmd(cli: &Cli, max_arity: usize, repair: bool, budget: usize) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("check-ainf", &loaded.raw);
    report.seed = cli.seed;
    let lc = doc.coalgebra();
    if lc.has_curvature() {
        bail!("document has unit terms in its differential; use the augmentation-shifted variant");
    }
    let la = dualize_coalgebra(&lc, DualSide::Left);
    la.validate().map_err(|e| anyhow!("{}", e))?;
    let result = check_ainf(&la, max_arity);
    report.line(format!(
        "A-infinity relations of the dual algebra of {} over {}, arity <= {}",
        doc.name, doc.field, max_arity
    ));
    for w in result.witnesses.iter() {
        report.witness(format!(
            "({}) -> {}",
            w.tuple.join(", "),
            w.residue.display(la.quiver())
        ));
    }
    if !result.ok && repair {
        repair_outcome_lines(&mut report, RepairTarget::Alg(la), max_arity, budget);
    }
    report.ok = Some(result.ok);
    Ok(report)
}

fn check_coainf_cmd(cli: &Cli, max_arity: usize, repair: bool, budget: usize) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("check-coainf", &loaded.raw);
    report.seed = cli.seed;
    let lc = doc.coalgebra();
    if lc.has_curvature() {
        bail!("document has unit terms in its differential; use the augmentation-shifted variant");
    }
    lc.validate().map_err(|e| anyhow!("{}", e))?;
    let result = check_coainf(&lc, max_arity);
    report.line(format!(
        "co-A-infinity relations of the coalgebra of {} over {}, arity <= {}",
        doc.name, doc.field, max_arity
    ));
    for w in result.witnesses.iter() {
        report.witness(format!(
            "({}) -> {}",
            w.tuple.join(", "),
            w.residue.display(lc.quiver())
        ));
    }
    if !result.ok && repair {
        repair_outcome_lines(&mut report, RepairTarget::Coalg(lc), max_arity, budget);
    }
    report.ok = Some(result.ok);
    Ok(report)
}

fn cobar_cmd(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("cobar", &loaded.raw);
    report.seed = cli.seed;
    let q = doc.quiver();
    let mut table = Map::new();
    for (g, gs) in q.gens() {
        if let Some(img) = doc.differential.image_of(g) {
            if !img.is_zero() {
                report.line(format!("d {} = {}", gs.name, img.display(q)));
                table.insert(gs.name.clone(), json!(format!("{}", img.display(q))));
            }
        }
    }
    report.table("differential", Value::Object(table));
    let omega = CobarObject::from_presentation(
        q.clone(),
        doc.differential.clone(),
        doc.field,
        &doc.name,
    );
    let witnesses = omega.d_squared_witnesses();
    for (g, dd) in witnesses.iter() {
        report.witness(format!("d²({}) = {}", g, dd.display(q)));
    }
    report.ok = Some(witnesses.is_empty());
    Ok(report)
}

fn bar_cmd(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("bar", &loaded.raw);
    report.seed = cli.seed;
    let lc = doc.coalgebra();
    if lc.has_curvature() {
        bail!("document has unit terms in its differential; use the augmentation-shifted variant");
    }
    let la = dualize_coalgebra(&lc, DualSide::Left);
    let max_len = cli.max_len.unwrap_or(3);
    let b = bar(&la, max_len).map_err(|e| anyhow!("{}", e))?;
    report.line(format!(
        "bar construction of the dual algebra of {}, word length <= {}",
        doc.name, max_len
    ));
    let mut by_degree: BTreeMap<i64, usize> = BTreeMap::new();
    for w in b.words.iter() {
        *by_degree.entry(b.degree(w)).or_insert(0) += 1;
    }
    let mut table = Map::new();
    for (deg, count) in by_degree.iter() {
        report.line(format!("degree {}: {} monomials", deg, count));
        table.insert(deg.to_string(), json!(count));
    }
    report.table("dimensions", Value::Object(table));
    let b2 = b.b_squared_witnesses();
    for (w, img) in b2.iter() {
        let rendered: Vec<String> = img.iter().map(|(l, c)| format!("{} {}", c, l)).collect();
        report.witness(format!("b²({}) = {}", w, rendered.join(" + ")));
    }
    report.ok = Some(b2.is_empty());
    Ok(report)
}

fn dual_cmd(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("dual", &loaded.raw);
    report.seed = cli.seed;
    let lc = doc.coalgebra();
    if lc.has_curvature() {
        bail!("document has unit terms in its differential; use the augmentation-shifted variant");
    }
    let la = dualize_coalgebra(&lc, DualSide::Left);
    let q = la.quiver();
    let mut table = Map::new();
    for (key, value) in la.ops.iter() {
        let keyname = format!(
            "m{}({})",
            key.len(),
            key.iter().map(|g| q.gen(*g).name.clone()).collect::<Vec<_>>().join(", ")
        );
        report.line(format!("{} = {}", keyname, value.display(q)));
        table.insert(keyname, json!(format!("{}", value.display(q))));
    }
    report.table("operations", Value::Object(table));
    report.ok = Some(true);
    Ok(report)
}

fn augmentations_cmd(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("augmentations", &loaded.raw);
    report.seed = cli.seed;
    let q = doc.quiver();
    let augs = enumerate_augmentations(q, &doc.differential, &doc.field)
        .map_err(|e| anyhow!("{}", e))?;
    report.line(format!("{} augmentations of {} over {}", augs.len(), doc.name, doc.field));
    let mut arr = Vec::new();
    for a in augs.iter() {
        let rendered: Vec<String> = a
            .iter()
            .map(|(g, v)| format!("eps({}) = {}", q.gen(*g).name, v))
            .collect();
        let line = if rendered.is_empty() { "zero augmentation".to_string() } else { rendered.join(", ") };
        report.line(format!("  {}", line));
        arr.push(json!(line));
    }
    report.table("augmentations", Value::Array(arr));
    report.table("count", json!(augs.len()));
    report.ok = Some(true);
    Ok(report)
}

fn doc_cochain(doc: &SpecDoc) -> Result<TwistingCochain> {
    let twist = doc
        .twist
        .clone()
        .ok_or_else(|| anyhow!("document {} has no twist block", doc.name))?;
    let target_doc = dsl::load_example(&twist.target)
        .map_err(|e| anyhow!("{}", e))?
        .with_field(doc.field)
        .map_err(|e| anyhow!("{}", e))?;
    let omega = CobarObject::from_presentation(
        target_doc.quiver().clone(),
        target_doc.differential.clone(),
        target_doc.field,
        &target_doc.name,
    );
    TwistingCochain::new(
        doc.coalgebra(),
        DgTarget::Cobar(Arc::new(omega)),
        twist.values,
        &format!("t({})", doc.name),
    )
    .map_err(|e| anyhow!("{}", e))
}

fn twist_verify_cmd(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("twist-verify", &loaded.raw);
    report.seed = cli.seed;
    let t = doc_cochain(doc)?;
    let result = verify_twist(&t);
    let mut arr = Vec::new();
    for eq in result.equations.iter() {
        let status = if eq.residue_zero { "ok" } else { "FAILS" };
        report.line(format!("{}; {} [{}]", eq.lhs, eq.rhs, status));
        arr.push(json!({
            "generator": eq.generator,
            "lhs": eq.lhs,
            "rhs": eq.rhs,
            "ok": eq.residue_zero,
        }));
    }
    report.table("equations", Value::Array(arr));
    for (g, res) in result.residues.iter() {
        report.witness(format!("residue on {}: {}", g, res.display(t.target.quiver())));
    }
    report.ok = Some(result.ok);
    Ok(report)
}

fn koszul_cmd(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("koszul", &loaded.raw);
    report.seed = cli.seed;
    let t = doc_cochain(doc)?;
    let (lo, hi, len) = window_params(cli, doc, (-6, 0, 8))?;
    let outcome = koszulity_verdict(&t, lo, hi, len).map_err(|e| anyhow!("{}", e))?;
    report.line(format!(
        "Koszul complex of {} on degrees {}..{}, word length <= {}",
        doc.name, lo, hi, len
    ));
    let mut table = Map::new();
    for (k, b) in outcome.betti.iter() {
        let cert = outcome.certified[k];
        report.line(format!(
            "degree {}: homology rank {}{}",
            k,
            b,
            if cert { "" } else { " (uncertified)" }
        ));
        table.insert(k.to_string(), json!({"betti": b, "certified": cert}));
    }
    report.table("homology", Value::Object(table));
    match &outcome.verdict {
        KoszulVerdict::AcyclicInWindow => {
            report.line("verdict: acyclic_in_window".to_string());
            report.table("verdict", json!("acyclic_in_window"));
            report.ok = Some(true);
        }
        KoszulVerdict::Fails { degree, witness } => {
            report.line(format!("verdict: fails at degree {} (window-relative)", degree));
            for (l, c) in witness {
                report.witness(format!("cycle term {} {}", c, l));
            }
            report.table("verdict", json!("fails"));
            report.status = Some("open".to_string());
        }
        KoszulVerdict::Inconclusive => {
            report.line("verdict: inconclusive (truncation at the window boundary)".to_string());
            report.table("verdict", json!("inconclusive"));
            report.status = Some("open".to_string());
        }
    }
    Ok(report)
}

fn homology_cmd(cli: &Cli) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("homology", &loaded.raw);
    report.seed = cli.seed;
    let lc = doc.coalgebra();
    if lc.has_curvature() {
        bail!("document has unit terms in its differential; use the augmentation-shifted variant");
    }
    let (lo, hi, len) = window_params(cli, doc, (-6, 0, 6))?;
    let omega = completed_cobar(&lc, len).map_err(|e| anyhow!("{}", e))?;
    let aw = omega.window(lo, hi, len).map_err(|e| anyhow!("{}", e))?;
    let betti = aw.window.betti().map_err(|e| anyhow!("{}", e))?;
    let mut table = Map::new();
    for k in lo..=hi {
        let cert = aw.window.certified(k);
        report.line(format!(
            "degree {}: dim {}, betti {}{}",
            k,
            aw.window.dim(k),
            betti[&k],
            if cert { "" } else { " (uncertified)" }
        ));
        table.insert(
            k.to_string(),
            json!({"dim": aw.window.dim(k), "betti": betti[&k], "certified": cert}),
        );
    }
    report.table("homology", Value::Object(table));
    report.ok = Some(true);
    Ok(report)
}

fn hopf_collapse_map(field: FieldSpec) -> Result<(Report, bool)> {
    // the printed collapse LA*(hopf) -> CF*(hopf small):
    // c12v -> a12, c21v -> a21, c2v -> a2, everything else -> 0
    let lc_doc = dsl::load_example("hopf_reduced")
        .map_err(|e| anyhow!("{}", e))?
        .with_field(field)
        .map_err(|e| anyhow!("{}", e))?;
    let cf_doc = dsl::load_example("hopf_small")
        .map_err(|e| anyhow!("{}", e))?
        .with_field(field)
        .map_err(|e| anyhow!("{}", e))?;
    let la = dualize_coalgebra(&lc_doc.coalgebra(), DualSide::Left);
    let cf = dualize_coalgebra(&cf_doc.coalgebra(), DualSide::Left);
    let src = la.module_window(0, 3).map_err(|e| anyhow!("{}", e))?;
    let dst = cf.module_window(0, 3).map_err(|e| anyhow!("{}", e))?;
    let images: BTreeMap<&str, &str> =
        [("c12v", "a12"), ("c21v", "a21"), ("c2v", "a2"), ("e(1)", "e(1)"), ("e(2)", "e(2)")]
            .into_iter()
            .collect();
    let f = ChainMap::from_images(&src, &dst, |_k, label| match images.get(label) {
        Some(target) => vec![(target.to_string(), field.one())],
        None => vec![],
    })
    .map_err(|e| anyhow!("{}", e))?;
    let result = quasi_iso(&f, &src, &dst).map_err(|e| anyhow!("not a chain map: {}", e))?;
    let mut report = Report::new("quasi-iso", "hopf collapse map");
    let mut ok = true;
    for (k, r) in result.rank_table.iter() {
        report.line(format!(
            "degree {}: H(src) {}, H(dst) {}, induced rank {}{}",
            k,
            r.src_homology,
            r.dst_homology,
            r.induced_rank,
            if r.iso { "" } else { " (not iso)" }
        ));
        ok &= r.iso;
    }
    Ok((report, ok))
}

fn quasi_iso_cmd(cli: &Cli, map: &str) -> Result<Report> {
    match map {
        "collapse" => {
            let field = match &cli.field {
                None => FieldSpec::PrimeField(2),
                Some(f) => parse_field(f)?,
            };
            let (mut report, ok) = hopf_collapse_map(field)?;
            report.seed = cli.seed;
            report.line(format!("collapse map over {}", field));
            report.ok = Some(ok);
            Ok(report)
        }
        "retraction" => {
            let loaded = load(cli)?;
            let doc = &loaded.doc;
            let mut report = Report::new("quasi-iso", &loaded.raw);
            report.seed = cli.seed;
            let t = doc_cochain(doc)?;
            let phi = induced_map(&t);
            // the retraction sends each target generator to the source
            // generator with the same base name
            let target_doc = dsl::load_example(&doc.twist.as_ref().unwrap().target)
                .map_err(|e| anyhow!("{}", e))?
                .with_field(doc.field)
                .map_err(|e| anyhow!("{}", e))?;
            let src_omega = CobarObject::from_presentation(
                doc.quiver().clone(),
                doc.differential.clone(),
                doc.field,
                &doc.name,
            );
            let tgt_omega = CobarObject::from_presentation(
                target_doc.quiver().clone(),
                target_doc.differential.clone(),
                target_doc.field,
                &target_doc.name,
            );
            let mut images = BTreeMap::new();
            for (g, gs) in target_doc.quiver().gens() {
                let base = koszulkit_core::ground::dual_name(&gs.name);
                if let Some(src_gen) = doc.quiver().gen_by_name(&base) {
                    images.insert(g, Element::generator(src_gen, &doc.field));
                }
            }
            let retraction =
                InducedMap { images, target: DgTarget::Cobar(Arc::new(src_omega)) };
            let witnesses = retraction.dg_map_witnesses(&tgt_omega);
            let mut ok = witnesses.is_empty();
            for (g, res) in witnesses {
                report.witness(format!("retraction fails Leibniz on {}: {}", g, res.display(doc.quiver())));
            }
            report.line("retraction is a DG-map".to_string());
            // composition with the induced map is the identity on generators
            for (g, gs) in target_doc.quiver().gens() {
                let Some(to_src) = retraction.images.get(&g) else { continue };
                let mut back = Element::zero();
                for (w, c) in to_src.terms() {
                    back = back.add(&phi.apply_word(w, &doc.field).scale(c));
                }
                let expected = Element::generator(g, &doc.field);
                if back == expected {
                    report.line(format!("retract of {} is the identity", gs.name));
                } else {
                    ok = false;
                    report.witness(format!(
                        "retract of {} is {}",
                        gs.name,
                        back.display(target_doc.quiver())
                    ));
                }
            }
            report.ok = Some(ok);
            Ok(report)
        }
        "unit" => {
            let loaded = load(cli)?;
            let doc = &loaded.doc;
            let mut report = Report::new("quasi-iso", &loaded.raw);
            report.seed = cli.seed;
            let (lo, hi, len) = window_params(cli, doc, (-6, 0, 7))?;
            let lc = doc.coalgebra();
            let cm = unit_map(&lc, len, len, lo, hi).map_err(|e| anyhow!("{}", e))?;
            let result = quasi_iso(&cm.map, &cm.src.window, &cm.dst.window)
                .map_err(|e| anyhow!("not a chain map: {}", e))?;
            let mut ok = true;
            for (k, r) in result.rank_table.iter() {
                report.line(format!(
                    "degree {}: H(C) {}, H(Bar Omega C) {}, induced rank {}{}",
                    k, r.src_homology, r.dst_homology, r.induced_rank,
                    if r.iso { "" } else { " (not iso)" }
                ));
                ok &= r.iso;
            }
            report.ok = Some(ok);
            Ok(report)
        }
        "counit" => {
            let loaded = load(cli)?;
            let doc = &loaded.doc;
            let mut report = Report::new("quasi-iso", &loaded.raw);
            report.seed = cli.seed;
            let (lo, hi, len) = window_params(cli, doc, (0, 3, 4))?;
            let lc = doc.coalgebra();
            if lc.has_curvature() {
                bail!("document has unit terms in its differential");
            }
            let a = dualize_coalgebra(&lc, DualSide::Left);
            let cm = counit_map(&a, len, len, lo, hi).map_err(|e| anyhow!("{}", e))?;
            let result = quasi_iso(&cm.map, &cm.src.window, &cm.dst.window)
                .map_err(|e| anyhow!("not a chain map: {}", e))?;
            let mut ok = true;
            for (k, r) in result.rank_table.iter() {
                report.line(format!(
                    "degree {}: H(Omega Bar A) {}, H(A) {}, induced rank {}{}",
                    k, r.src_homology, r.dst_homology, r.induced_rank,
                    if r.iso { "" } else { " (not iso)" }
                ));
                ok &= r.iso;
            }
            report.ok = Some(ok);
            Ok(report)
        }
        other => bail!("unknown map {} (expected unit, counit, collapse, retraction)", other),
    }
}

fn primitive_cmd(cli: &Cli, target: &str, degree: i64) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("primitive", &loaded.raw);
    report.seed = cli.seed;
    let q = doc.quiver();
    let element = dsl::parse_expression(target, doc).map_err(|e| anyhow!("target: {}", e))?;
    let max_len = cli.max_len.unwrap_or(5);
    let outcome = find_primitive(&doc.differential, &element, degree, max_len, q, &doc.field)
        .map_err(|e| anyhow!("{}", e))?;
    report.line(format!(
        "primitive search for {} in degree {}, word length <= {} ({} candidates)",
        element.display(q),
        degree,
        max_len,
        outcome.candidates
    ));
    match &outcome.primitive {
        Some(x) => {
            report.line(format!("primitive found: {}", x.display(q)));
            // post-verify
            let check = doc.differential.apply(x, q);
            let ok = check == element;
            report.line(format!("post-check d(x) = target: {}", if ok { "ok" } else { "FAILED" }));
            report.table("primitive", json!(format!("{}", x.display(q))));
            report.table("found", json!(true));
        }
        None => {
            report.line("no primitive exists within the bound (exact certificate)".to_string());
            report.table("found", json!(false));
        }
    }
    report.status = Some("open".to_string());
    Ok(report)
}

fn rewrite_cmd(cli: &Cli, rules: &[String], expr: &str) -> Result<Report> {
    let loaded = load(cli)?;
    let doc = &loaded.doc;
    let mut report = Report::new("rewrite", &loaded.raw);
    report.seed = cli.seed;
    let q = doc.quiver();
    let mut parsed_rules = Vec::new();
    for r in rules {
        let (lhs, rhs) = r
            .split_once("->")
            .ok_or_else(|| anyhow!("rule must look like \"b3 b4 -> -1\""))?;
        let lhs_elem = dsl::parse_expression(lhs.trim(), doc).map_err(|e| anyhow!("{}", e))?;
        let rhs_elem = dsl::parse_expression(rhs.trim(), doc).map_err(|e| anyhow!("{}", e))?;
        let mut terms = lhs_elem.terms();
        let (word, coeff) = terms
            .next()
            .ok_or_else(|| anyhow!("rule left side must be a single word"))?;
        if terms.next().is_some() || !coeff.is_one() {
            bail!("rule left side must be a single word with coefficient 1");
        }
        let Word::Path(gens) = word else { bail!("rule left side must be a generator word") };
        parsed_rules.push(RewriteRule { lhs: gens.clone(), rhs: rhs_elem });
    }
    let element = dsl::parse_expression(expr, doc).map_err(|e| anyhow!("{}", e))?;
    let max_len = cli.max_len.unwrap_or(6);
    let nf = normal_form(&parsed_rules, &element, q, max_len);
    report.line(format!("input:       {}", element.display(q)));
    report.line(format!("normal form: {}", nf.nf.display(q)));
    report.line(format!("stable: {}", nf.stable));
    report.table("normal_form", json!(format!("{}", nf.nf.display(q))));
    report.table("stable", json!(nf.stable));
    report.table("nonzero", json!(!nf.nf.is_zero()));
    report.ok = Some(true);
    Ok(report)
}

fn cube_demo_cmd(cli: &Cli) -> Result<Report> {
    let mut report = Report::new("cube-demo", "cubical chain identities");
    report.seed = cli.seed;
    let (ok, transcript) = koszulkit_core::cubical::demo_transcript();
    for line in transcript.lines() {
        report.line(line.to_string());
    }
    report.ok = Some(ok);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn dim_cmd(
    cli: &Cli,
    formula: &str,
    n: Option<i64>,
    punctures: &Option<String>,
    positive: &Option<String>,
    negative: &Option<String>,
    extra: &Option<String>,
    deg: Option<i64>,
    cz: Option<i64>,
    leg: Option<i64>,
) -> Result<Report> {
    let mut report = Report::new("dim", &format!("dim {}", formula));
    report.seed = cli.seed;
    match formula {
        "convert" => {
            let degree = match (deg, cz, leg) {
                (Some(d), None, None) => d,
                (None, Some(cz), None) => cz_and_dim(&DimQuery::DegreeFromCz(cz)),
                (None, None, Some(l)) => cz_and_dim(&DimQuery::DegreeFromLeg(l)),
                _ => bail!("give exactly one of --deg, --cz, --leg"),
            };
            let cz = cz_and_dim(&DimQuery::CzFromDegree(degree));
            let leg = cz_and_dim(&DimQuery::LegFromDegree(degree));
            report.line(format!("|c| = {}, CZ = {}, |c|_Leg = {}", degree, cz, leg));
            report.table("deg", json!(degree));
            report.table("cz", json!(cz));
            report.table("leg", json!(leg));
        }
        "fi" => {
            let n = n.ok_or_else(|| anyhow!("--n is required"))?;
            let p = parse_list(punctures)?;
            let d = cz_and_dim(&DimQuery::DimFilling { n, punctures: p.clone() });
            report.line(format!("dim M(fi), n = {}, punctures {:?}: {}", n, p, d));
            report.table("dim", json!(d));
        }
        "sy" => {
            let n = n.ok_or_else(|| anyhow!("--n is required"))?;
            let pos = parse_list(positive)?;
            let neg = parse_list(negative)?;
            let d = cz_and_dim(&DimQuery::DimSymplectization {
                n,
                positive: pos.clone(),
                negative: neg.clone(),
            });
            report.line(format!(
                "dim M(sy), n = {}, positive {:?}, negative {:?}: {}",
                n, pos, neg, d
            ));
            report.table("dim", json!(d));
        }
        "co" => {
            let n = n.ok_or_else(|| anyhow!("--n is required"))?;
            let chords = parse_list(positive)?;
            let consts = parse_list(extra)?;
            let d = cz_and_dim(&DimQuery::DimCocore {
                n,
                chords: chords.clone(),
                constant_chords: consts.clone(),
            });
            report.line(format!(
                "dim M(co), n = {}, chords {:?}, constant chords {:?}: {}",
                n, chords, consts, d
            ));
            report.table("dim", json!(d));
        }
        "cobar" => {
            let n = n.ok_or_else(|| anyhow!("--n is required"))?;
            let chords = parse_list(positive)?;
            let xs = parse_list(extra)?;
            let d = cz_and_dim(&DimQuery::DimCocoreFilled {
                n,
                chords: chords.clone(),
                intersections: xs.clone(),
            });
            report.line(format!(
                "dim M(co-bar), n = {}, chords {:?}, intersections {:?}: {}",
                n, chords, xs, d
            ));
            report.table("dim", json!(d));
        }
        other => bail!("unknown formula {} (expected fi, sy, co, cobar, convert)", other),
    }
    report.ok = Some(true);
    Ok(report)
}

fn doc_to_json(doc: &SpecDoc) -> Value {
    let q = doc.quiver();
    let vertices: Vec<Value> = q
        .ring
        .vertices()
        .map(|(_, n, d)| json!({"id": n, "decoration": format!("{}", d)}))
        .collect();
    let generators: Vec<Value> = q
        .gens()
        .map(|(_, g)| {
            json!({
                "name": g.name,
                "src": q.ring.vertex_name(g.src),
                "dst": q.ring.vertex_name(g.dst),
                "degree": g.degree,
                "weight": g.weight,
            })
        })
        .collect();
    let mut differential = Map::new();
    for (gid, g) in q.gens() {
        if let Some(img) = doc.differential.image_of(gid) {
            if !img.is_zero() {
                differential.insert(g.name.clone(), json!(format!("{}", img.display(q))));
            }
        }
    }
    let mut augmentation = Map::new();
    for (gid, v) in doc.augmentation.iter() {
        augmentation.insert(q.gen(*gid).name.clone(), json!(format!("{}", v)));
    }
    let twist = doc.twist.as_ref().map(|t| {
        let mut values = Map::new();
        if let Ok(target) = dsl::load_example(&t.target) {
            for (gid, v) in t.values.iter() {
                values.insert(
                    q.gen(*gid).name.clone(),
                    json!(format!("{}", v.display(target.quiver()))),
                );
            }
        }
        json!({"target": t.target, "values": values})
    });
    json!({
        "name": doc.name,
        "field": format!("{}", doc.field),
        "vertices": vertices,
        "generators": generators,
        "differential": differential,
        "augmentation": augmentation,
        "twist": twist,
        "window": doc.window.map(|w| json!({
            "d_min": w.d_min, "d_max": w.d_max, "max_len": w.max_len
        })),
    })
}

fn examples_cmd(cli: &Cli) -> Result<Report> {
    match (&cli.example, &cli.input) {
        (None, None) => {
            let mut report = Report::new("examples", "list");
            report.seed = cli.seed;
            let ids = dsl::example_ids();
            for id in ids.iter() {
                report.line(id.clone());
            }
            report.table("ids", json!(ids));
            report.ok = Some(true);
            Ok(report)
        }
        _ => {
            let loaded = load(cli)?;
            let mut report = Report::new("examples", &loaded.raw);
            report.seed = cli.seed;
            for line in dsl::serialize(&loaded.doc).lines() {
                report.line(line.to_string());
            }
            report.table("document", doc_to_json(&loaded.doc));
            report.ok = Some(true);
            Ok(report)
        }
    }
}
