//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use qprim::ideal::generate;
use qprim::iso::ring_isomorphic;
use qprim::sheaf::{
    localize_element, localize_multset, DirectImage, Sheaf, DEFAULT_COVER_CANDIDATES_LOG2,
};
use qprim::topology::{disjoint_decomposition, spectrum};
use qprim::verify::{default_corpus, report_json, run_suite, Status, SuiteOptions};
use qprim::{all_ideals, build_ring, FiniteRing, Ideal, RingSpec, SpectrumKind};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ring(spec: &RingSpec) -> Arc<FiniteRing> {
    build_ring(spec).expect("corpus spec builds")
}

fn lattice_oracle() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for spec in default_corpus() {
        let r = ring(&spec);
        if r.order() > 16 {
            continue;
        }
        let mut computed: Vec<Vec<usize>> = all_ideals(&r)
            .map_err(|e| e.to_string())?
            .ideals()
            .iter()
            .map(Ideal::elements)
            .collect();
        computed.sort();
        ensure(
            computed == common::subset_ideals(&r),
            format!("lattice differs on {spec}"),
        )?;
        checked += 1;
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(10),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "{checked} rings of order <= 16 match subset filtering in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn fixed_values() -> Outcome {
    let r = ring(&RingSpec::zmod(12));
    let (oracle_points, oracle_closed) = common::qprim_and_closed_sets(&r);
    let q = spectrum(&r, SpectrumKind::QPrim).map_err(|e| e.to_string())?;
    let s = spectrum(&r, SpectrumKind::Spec).map_err(|e| e.to_string())?;
    ensure(
        q.len() == 3 && oracle_points.len() == 3,
        format!("|QPrim(Z/12)| = {}", q.len()),
    )?;
    let oracle_primes = oracle_points
        .iter()
        .filter(|p| common::is_prime(&r, p))
        .count();
    ensure(
        s.len() == 2 && oracle_primes == 2,
        format!("|Spec(Z/12)| = {}", s.len()),
    )?;
    ensure(
        q.topology().len() == 4 && oracle_closed.len() == 4,
        format!("{} closed sets", q.topology().len()),
    )?;

    let at2 = localize_multset(&r, &[2]).map_err(|e| e.to_string())?;
    ensure(
        at2.order() == 3 && common::localization_order(&r, &[2]) == 3,
        format!("(Z/12)_2 has order {}", at2.order()),
    )?;

    let p4 = q
        .lattice()
        .index_of(&generate(&r, &[4]))
        .and_then(|i| q.point_of(i))
        .ok_or("(4) is not a point")?;
    let p2 = q
        .lattice()
        .index_of(&generate(&r, &[2]))
        .and_then(|i| q.point_of(i))
        .ok_or("(2) is not a point")?;
    let sheaf = Sheaf::new(Arc::new(q)).map_err(|e| e.to_string())?;
    let stalk = sheaf.stalk(p4).map_err(|e| e.to_string())?;
    let odds: Vec<usize> = (1..12).step_by(2).collect();
    ensure(
        stalk.ring.order() == 4 && common::localization_order(&r, &odds) == 4,
        format!("stalk at (4) has order {}", stalk.ring.order()),
    )?;
    ensure(common::is_local(&stalk.ring), "stalk at (4) is not local")?;
    let space = sheaf.space();
    ensure(
        space.closure(p2).points == space.closure(p4).points
            && space.closure_by_intersection(p2) == space.closure_by_intersection(p4),
        "closures of (2) and (4) differ",
    )?;
    Ok("|QPrim|=3, |Spec|=2, 4 closed sets, (Z/12)_2 order 3, stalk at (4) order 4 local, cl(2)=cl(4)".into())
}

fn theorem_suite() -> Outcome {
    let start = Instant::now();
    let verdicts =
        run_suite(&default_corpus(), &SuiteOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let required =
        |id: &str| !(id.starts_with("C15") || id.starts_with("C21") || id.starts_with("C22"));
    let mut cells = 0;
    for v in verdicts.iter().filter(|v| required(v.check)) {
        ensure(
            v.status == Status::Pass,
            format!(
                "{} {} on {}",
                v.check,
                serde_json::to_string(&v.status).unwrap(),
                v.ring
            ),
        )?;
        cells += 1;
    }
    ensure(cells == 19 * 19, format!("{cells} required cells"))?;
    ensure(
        elapsed < Duration::from_secs(60),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "{cells} (ring, check) cells for C01-C14, C16-C20 pass in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn sheaf_axioms() -> Outcome {
    let rings = [
        RingSpec::zmod(12),
        RingSpec::zmod(4),
        RingSpec::product(vec![RingSpec::zmod(2), RingSpec::zmod(2)]),
        RingSpec::poly_quotient(2, vec![0, 0, 1]),
        RingSpec::zmod(36),
    ];
    let mut covers = 0;
    for spec in &rings {
        let r = ring(spec);
        let sheaf = Sheaf::new(Arc::new(
            spectrum(&r, SpectrumKind::QPrim).map_err(|e| e.to_string())?,
        ))
        .map_err(|e| e.to_string())?;
        let report = sheaf.check_sheaf_axioms(DEFAULT_COVER_CANDIDATES_LOG2);
        ensure(
            report.failures.is_empty(),
            format!("{} cover failures on {spec}", report.failures.len()),
        )?;
        ensure(
            report.truncated.is_empty(),
            format!("cover enumeration truncated on {spec}"),
        )?;
        covers += report.covers;
    }
    Ok(format!(
        "identity and gluing hold on {covers} covers over 5 rings"
    ))
}

fn direct_image() -> Outcome {
    let mut opens = 0;
    for spec in default_corpus() {
        let r = ring(&spec);
        let q = Arc::new(spectrum(&r, SpectrumKind::QPrim).map_err(|e| e.to_string())?);
        let s = Arc::new(spectrum(&r, SpectrumKind::Spec).map_err(|e| e.to_string())?);
        let di = DirectImage::new(q.clone(), s).map_err(|e| e.to_string())?;
        let report = di.report().map_err(|e| e.to_string())?;
        ensure(report.holds(), format!("{spec}: {report:?}"))?;
        for open in q.topology().open_sets() {
            let f = di.qprim.sections(&open.points);
            let o = di.spec.sections(&di.pullback(&open.points));
            let iso = ring_isomorphic(&f.ring, &o.ring).map_err(|e| e.to_string())?;
            ensure(
                iso.is_some(),
                format!("{spec}: F(U) and O(pullback U) not isomorphic"),
            )?;
            opens += 1;
        }
        let global = di.qprim.sections(&q.full_set());
        ensure(
            ring_isomorphic(&global.ring, &r)
                .map_err(|e| e.to_string())?
                .is_some(),
            format!("{spec}: global sections differ from R"),
        )?;
    }
    Ok(format!(
        "F(U) = O(pullback U) on {opens} opens of 19 rings; global sections = R"
    ))
}

fn localization_agreement() -> Outcome {
    let mut pairs = 0;
    for spec in default_corpus() {
        let r = ring(&spec);
        for a in 0..r.order() {
            let l = localize_element(&r, a).map_err(|e| format!("{spec}, a = {a}: {e}"))?;
            let e = (1..=r.order())
                .map(|k| common::power(&r, a, k))
                .find(|&x| r.mul(x, x) == x)
                .ok_or("no idempotent power")?;
            let carrier: common::Set = (0..r.order()).map(|x| r.mul(e, x)).collect();
            ensure(
                l.comparison.is_bijective()
                    && l.localized.order() == carrier.len()
                    && l.localized.order() == common::localization_order(&r, &[a])
                    && (0..r.order()).all(|x| {
                        l.comparison.apply(l.localized.hom().apply(x)) == l.carrier_map.apply(x)
                    }),
                format!("{spec}, a = {a}"),
            )?;
            pairs += 1;
        }
    }
    Ok(format!(
        "kernel quotient and eR agree on {pairs} (ring, element) pairs"
    ))
}

fn c15_decomposition() -> Outcome {
    let mut products = 0;
    for spec in default_corpus()
        .into_iter()
        .filter(|s| matches!(s, RingSpec::Product { .. }))
    {
        let r = ring(&spec);
        let d =
            disjoint_decomposition(&spectrum(&r, SpectrumKind::QPrim).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
        ensure(d.verified(), format!("{spec}: {d:?}"))?;
        if spec == RingSpec::product(vec![RingSpec::zmod(2), RingSpec::zmod(2)]) {
            ensure(
                (d.total_points, d.disjoint_union_count, d.product_count) == (2, 2, 1),
                format!("Z/2 x Z/2 counts {d:?}"),
            )?;
        }
        products += 1;
    }
    let opts = SuiteOptions {
        filter: vec!["C15".into()],
        ..SuiteOptions::default()
    };
    let v = run_suite(
        &[RingSpec::product(vec![
            RingSpec::zmod(2),
            RingSpec::zmod(2),
        ])],
        &opts,
    )
    .map_err(|e| e.to_string())?;
    let info = v[0].info.as_ref().ok_or("C15 verdict has no info")?;
    ensure(
        v[0].status == Status::Pass
            && info["disjoint_union_count"] == 2
            && info["product_count"] == 1,
        "C15 verdict on Z/2 x Z/2",
    )?;
    Ok(format!(
        "disjoint union verified on {products} product rings; Z/2 x Z/2 reports 2 vs 1"
    ))
}

fn determinism() -> Outcome {
    let a = report_json(
        &run_suite(&default_corpus(), &SuiteOptions::default()).map_err(|e| e.to_string())?,
    );
    let b = report_json(
        &run_suite(&default_corpus(), &SuiteOptions::default()).map_err(|e| e.to_string())?,
    );
    ensure(a == b, "in-process reports differ")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    for name in ["first.json", "second.json"] {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_qprim"))
            .args(["verify", "--corpus", "default", "--out"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.success(), format!("verify exited with {status}"))?;
        bytes.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(bytes[0] == bytes[1], "CLI reports differ")?;
    ensure(
        bytes[0] == a.as_bytes(),
        "CLI report differs from library report",
    )?;
    Ok(format!(
        "two verify runs give identical {}-byte reports",
        bytes[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("ideal-lattice oracle", lattice_oracle),
        ("fixed values", fixed_values),
        ("theorem suite", theorem_suite),
        ("sheaf axioms", sheaf_axioms),
        ("direct-image theorem", direct_image),
        ("two-algorithm localization", localization_agreement),
        ("C15 decomposition", c15_decomposition),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} acceptance criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
