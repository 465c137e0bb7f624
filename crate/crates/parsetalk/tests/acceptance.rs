//! The acceptance suite. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion does. Run with `--nocapture` to see the lines.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{edge_sets, fixture, grammar, kb, sentences, BruteForce};
use parsetalk::core::chart::{self, ChartConfig};
use parsetalk::core::syntax::syntax_check;
use parsetalk::core::text::parse_text;
use parsetalk::core::word::WordActor;
use parsetalk::core::{engine, ContextStore, Metrics, ParseConfig, ParseResult};
use parsetalk::corpus::load_corpus;
use parsetalk::harness::{reduction_factor, run_corpus, BenchConfig, Check, MetricsTable, System};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn toks(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn parse(s: &str, cfg: &ParseConfig) -> ParseResult {
    engine::parse(&toks(s), &grammar(), &kb(), cfg).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (g, kb) = (grammar(), kb());
    let brute = BruteForce::from_fixtures();
    let corpus = sentences("oracle.txt");
    ensure(corpus.len() >= 20, || format!("only {} sentences", corpus.len()))?;
    for s in &corpus {
        let t: Vec<&str> = s.iter().map(String::as_str).collect();
        ensure(t.len() <= 8, || format!("{:?} is longer than 8 tokens", t))?;
        let ex = edge_sets(&engine::parse(&t, &g, &kb, &ParseConfig::exhaustive()).unwrap());
        let dis = edge_sets(&chart::parse(&t, &g, &kb, &ChartConfig::discontinuous()).unwrap());
        let bf = brute.analyses(&t, ChartConfig::default().gap_cap);
        ensure(ex == dis && dis == bf, || {
            format!(
                "{:?}: exhaustive {ex:?}, discontinuous chart {dis:?}, enumeration {bf:?}",
                s.join(" ")
            )
        })?;
    }
    let spent = start.elapsed();
    ensure(spent < Duration::from_secs(60), || format!("took {spent:?}"))?;
    Ok(format!("{} sentences identical in {:.1?}", corpus.len(), spent))
}

fn price_ambiguity() -> Outcome {
    let r = parse("Zenon sells this printer for $2,000", &ParseConfig::default());
    ensure(r.complete && r.analyses.len() == 2, || {
        format!("{} analyses", r.analyses.len())
    })?;
    let (a, b) = (&r.analyses[0].interpretation, &r.analyses[1].interpretation);
    ensure(a.instances == b.instances, || "instances differ".into())?;
    let only_a: Vec<_> = a.assertions.iter().filter(|x| !b.assertions.contains(x)).collect();
    let only_b: Vec<_> = b.assertions.iter().filter(|x| !a.assertions.contains(x)).collect();
    ensure(only_a.len() == 1 && only_b.len() == 1, || {
        format!("{only_a:?} vs {only_b:?}")
    })?;
    let ((sa, ra, fa), (sb, rb, fb)) = (only_a[0], only_b[0]);
    ensure(fa == fb && sa != sb, || {
        "the assertions differ in more than the subject".into()
    })?;
    let roles: BTreeSet<&str> = [ra.as_str(), rb.as_str()].into();
    ensure(roles == BTreeSet::from(["PRICE-OF-PRODUCT", "PRICE-OF-SALE"]), || {
        format!("roles {roles:?}")
    })?;
    Ok("price attaches to SELL or PRINTER".into())
}

fn unknown_word() -> Outcome {
    let r = parse("Zenon sells this printer totally over-priced", &ParseConfig::default());
    let skipped: Vec<u32> = r.skipped.iter().collect();
    ensure(r.complete && skipped == [4], || {
        format!("skipped {skipped:?}, complete {}", r.complete)
    })?;
    Ok("skipped {4}".into())
}

fn garden_path() -> Outcome {
    let r = parse("the customer bought the silver notebook", &ParseConfig::default());
    let amod = r.analyses.iter().all(|a| {
        a.edges
            .iter()
            .any(|e| (e.head, e.modifier, e.label.as_str()) == (5, 4, "amod"))
    });
    ensure(r.complete && amod && r.metrics.backtrack_events >= 1, || {
        format!(
            "complete {}, amod {amod}, backtracks {}",
            r.complete, r.metrics.backtrack_events
        )
    })?;
    Ok(format!("{} backtracks", r.metrics.backtrack_events))
}

fn predictions() -> Outcome {
    let s = toks("Zenon sells this printer");
    let cfg = ParseConfig::default();
    let with = engine::parse(&s, &grammar(), &kb(), &cfg).unwrap();
    let without = engine::parse(&s, &grammar().without_predictions(), &kb(), &cfg).unwrap();
    let (a, b) = (with.metrics.backtrack_events, without.metrics.backtrack_events);
    ensure(a == 0 && b >= 1, || format!("{a} with predictions, {b} without"))?;
    Ok(format!("{a} backtracks with predictions, {b} without"))
}

fn incompleteness_witness() -> Outcome {
    let s = "a review appeared of the printer";
    let r = parse(s, &ParseConfig::default());
    let x = parse(s, &ParseConfig::exhaustive());
    let d = chart::parse(&toks(s), &grammar(), &kb(), &ChartConfig::discontinuous()).unwrap();
    ensure(!r.complete && x.complete && d.complete, || {
        format!(
            "restricted {}, exhaustive {}, chart {}",
            r.complete, x.complete, d.complete
        )
    })?;
    Ok("restricted incomplete, complete modes complete".into())
}

fn corpus_table() -> MetricsTable {
    let corpus = load_corpus(&fixture("corpus.txt")).unwrap();
    let systems = [
        System::EngineRestricted,
        System::ChartStandard,
        System::ChartDiscontinuous,
    ];
    run_corpus(&corpus, &grammar(), &kb(), &systems, &BenchConfig::default())
}

fn efficiency(table: &MetricsTable, spent: Duration) -> Outcome {
    let lengths: Vec<usize> = table
        .cells
        .iter()
        .filter(|c| c.system == System::EngineRestricted)
        .map(|c| c.tokens)
        .collect();
    ensure(lengths.len() == 13, || format!("{} sentences", lengths.len()))?;
    ensure(
        lengths.windows(2).all(|w| w[0] < w[1]) && lengths[0] == 4 && lengths[12] == 20,
        || format!("lengths {lengths:?}"),
    )?;
    let mut parts = Vec::new();
    for check in Check::ALL {
        let f = |b| reduction_factor(table, b, System::EngineRestricted, check).unwrap_or(0.0);
        let (std, dis) = (f(System::ChartStandard), f(System::ChartDiscontinuous));
        ensure(std >= 2.0 && dis >= std, || {
            format!("{}: standard {std:.2}, discontinuous {dis:.2}", check.id())
        })?;
        parts.push(format!("{} {std:.2}/{dis:.2}", check.id()));
    }
    ensure(spent < Duration::from_secs(120), || format!("took {spent:?}"))?;
    Ok(parts.join(", "))
}

fn centering() -> Outcome {
    let tokens = parsetalk::corpus::load_text(&fixture("text.txt")).unwrap();
    let t: Vec<&str> = tokens.iter().map(String::as_str).collect();
    let r = parse_text(&t, &grammar(), &kb(), &ParseConfig::default(), &Metrics::new()).unwrap();
    ensure(r.utterances.len() == 2, || format!("{} utterances", r.utterances.len()))?;
    let company = r
        .resolutions
        .iter()
        .find(|x| x.utterance == 1 && t[7 + x.token as usize] == "company")
        .ok_or("no resolution entry for `the company`")?;
    ensure(company.antecedent == Some((0, 0)), || {
        format!("antecedent {:?}", company.antecedent)
    })?;

    let first = &r.utterances[0].parse.analyses[0];
    let zenon = first.word(0).and_then(|w| w.instance).ok_or("Zenon has no referent")?;
    let nodes =
        |xs: &mut dyn Iterator<Item = &(_, String, _)>| -> BTreeSet<_> { xs.flat_map(|(s, _, f)| [*s, *f]).collect() };
    let before = nodes(&mut first.interpretation.assertions.iter());
    let added = nodes(
        &mut r
            .interpretation
            .assertions
            .iter()
            .filter(|x| !first.interpretation.assertions.contains(x)),
    );
    let shared: Vec<_> = before.intersection(&added).collect();
    ensure(shared == [&zenon], || {
        format!("shared nodes {shared:?}, Zenon is {zenon:?}")
    })?;

    let cb = r.utterances[1].centers.cb.as_ref().ok_or("no cb")?;
    ensure(cb.instance == zenon, || format!("cb is {cb:?}"))?;
    Ok("`the company` is Zenon, cb(U2) = Zenon".into())
}

fn reproducible_bench() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_parsetalk"))
            .arg("bench")
            .args([fixture("grammar.json"), fixture("kb.json"), fixture("corpus.txt")])
            .args(["--systems", "engine-restricted,chart-standard", "--seed", "7", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            String::from_utf8_lossy(&status.stderr).into_owned()
        })?;
        std::fs::read(out.join(parsetalk::report::CSV_FILE)).map_err(|e| e.to_string())
    };
    let (a, b) = (run("first")?, run("second")?);
    ensure(a == b, || "the two CSV files differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn counter_exactness(table: &MetricsTable) -> Outcome {
    let (g, kb) = (grammar(), kb());
    let m = Metrics::new();
    let word = |s: &str, t: u32| {
        let id = g.lookup(s)[0];
        let e = g.lexeme(id);
        WordActor::lexical(Some(id), e.class, t, Arc::new(e.features.clone()), None)
    };
    let sells = word("sells", 1);
    let frame = g.frame(sells.class);
    let mut expected = 0;
    for (t, s) in ["Zenon", "printer", "over-priced", "for"].into_iter().enumerate() {
        for v in frame {
            syntax_check(&g, &sells, &word(s, t as u32 * 2), v, &m);
            expected += 1;
        }
    }
    ensure(m.snapshot().syntax_checks == expected, || {
        format!(
            "{} syntax checks recorded for {expected} calls",
            m.snapshot().syntax_checks
        )
    })?;

    let mut store = ContextStore::new();
    let ctx = store.clone_context(store.root()).unwrap();
    let sell = store.assert_instance(&kb, ctx, "SELL").unwrap().id;
    let money = store.assert_instance(&kb, ctx, "MONEY").unwrap().id;
    let mut calls = 0;
    for role in ["PRICE-OF-SALE", "PRICE-OF-PRODUCT", "AGENT"] {
        for (h, f) in [(sell, money), (money, sell)] {
            store.concept_check(&kb, ctx, h, role, f, &m).unwrap();
            calls += 1;
        }
    }
    ensure(m.snapshot().concept_checks == calls, || {
        format!(
            "{} concept checks recorded for {calls} calls",
            m.snapshot().concept_checks
        )
    })?;

    for (&system, total) in &table.totals {
        let sum = table.cell_sum(system);
        ensure(
            sum.syntax_checks == total.syntax_checks && sum.concept_checks == total.concept_checks,
            || format!("{system}: cells {sum:?}, run {total:?}"),
        )?;
    }
    Ok(format!(
        "{expected} syntax and {calls} concept calls counted; cell sums match run totals"
    ))
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let table = corpus_table();
    let bench_time = start.elapsed();

    let results: [(&str, Outcome); 10] = [
        ("oracle equivalence", oracle_equivalence()),
        ("attachment ambiguity", price_ambiguity()),
        ("unknown word", unknown_word()),
        ("garden path", garden_path()),
        ("predictions", predictions()),
        ("incompleteness witness", incompleteness_witness()),
        ("efficiency", efficiency(&table, bench_time)),
        ("centering", centering()),
        ("reproducibility", reproducible_bench()),
        ("counter exactness", counter_exactness(&table)),
    ];
    let mut failed = Vec::new();
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
