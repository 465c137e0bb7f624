//! Corpus runner: every (sentence, system) cell is parsed with its own
//! counters, which also feed one run-level record per system.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use parsetalk_core::chart::{self, ChartConfig, ChartVariant};
use parsetalk_core::{ContextStore, Grammar, Kb, Metrics, MetricsRecord, Mode, ParseConfig, ParseError, ParseResult};

use crate::corpus::Sentence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    EngineRestricted,
    EngineExhaustive,
    ChartStandard,
    ChartDiscontinuous,
}

impl System {
    pub const ALL: [System; 4] = [
        System::EngineRestricted,
        System::EngineExhaustive,
        System::ChartStandard,
        System::ChartDiscontinuous,
    ];

    pub fn id(self) -> &'static str {
        match self {
            System::EngineRestricted => "engine-restricted",
            System::EngineExhaustive => "engine-exhaustive",
            System::ChartStandard => "chart-standard",
            System::ChartDiscontinuous => "chart-discontinuous",
        }
    }

    /// Parses one sentence; `metrics` sees every counted check, also those
    /// of a run that ends in an error.
    pub fn parse(
        self,
        tokens: &[&str],
        g: &Grammar,
        kb: &Kb,
        parse: &ParseConfig,
        chart_cfg: &ChartConfig,
        metrics: &Metrics,
    ) -> Result<ParseResult, ParseError> {
        let mut store = ContextStore::new();
        let base = store.root();
        match self {
            System::EngineRestricted | System::EngineExhaustive => {
                let mut cfg = parse.clone();
                cfg.mode = if self == System::EngineRestricted {
                    Mode::Restricted
                } else {
                    Mode::Exhaustive
                };
                parsetalk_core::engine::parse_with(&mut store, base, tokens, g, kb, &cfg, metrics)
            }
            System::ChartStandard | System::ChartDiscontinuous => {
                let variant = if self == System::ChartStandard {
                    ChartVariant::Standard
                } else {
                    ChartVariant::Discontinuous
                };
                let cfg = ChartConfig { variant, ..*chart_cfg };
                chart::parse_with(&mut store, base, tokens, g, kb, &cfg, metrics)
            }
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, thiserror::Error)]
#[error(
    "unknown system `{0}` (expected one of engine-restricted, engine-exhaustive, chart-standard, chart-discontinuous)"
)]
pub struct UnknownSystem(String);

impl FromStr for System {
    type Err = UnknownSystem;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        System::ALL
            .into_iter()
            .find(|sys| sys.id() == s)
            .ok_or_else(|| UnknownSystem(s.to_string()))
    }
}

pub fn parse_systems(list: &str) -> Result<Vec<System>, UnknownSystem> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct BenchConfig {
    pub parse: ParseConfig,
    pub chart: ChartConfig,
    /// Record wall-clock time per cell. Off by default so that reports are
    /// reproducible byte for byte.
    pub wall_time: bool,
    /// Worker threads; 0 picks the available parallelism.
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub sentence_id: usize,
    pub tokens: usize,
    pub system: System,
    /// Absent when the system failed on the sentence.
    pub record: Option<MetricsRecord>,
    /// Counters spent on the cell whether or not it succeeded.
    pub spent: MetricsRecord,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct MetricsTable {
    pub systems: Vec<System>,
    /// Sentence-major, systems in the requested order.
    pub cells: Vec<Cell>,
    /// Run-level counters per system, accumulated independently of the cells.
    pub totals: BTreeMap<System, MetricsRecord>,
}

impl MetricsTable {
    pub fn cell(&self, sentence_id: usize, system: System) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.sentence_id == sentence_id && c.system == system)
    }

    pub fn sentence_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.cells.iter().map(|c| c.sentence_id).collect();
        ids.dedup();
        ids
    }

    /// Sum of the per-cell counters of one system.
    pub fn cell_sum(&self, system: System) -> MetricsRecord {
        let mut sum = MetricsRecord::default();
        for c in self.cells.iter().filter(|c| c.system == system) {
            sum.syntax_checks += c.spent.syntax_checks;
            sum.concept_checks += c.spent.concept_checks;
            sum.anaphora_concept_checks += c.spent.anaphora_concept_checks;
            sum.backtrack_events += c.spent.backtrack_events;
        }
        sum
    }
}

pub fn run_corpus(corpus: &[Sentence], g: &Grammar, kb: &Kb, systems: &[System], cfg: &BenchConfig) -> MetricsTable {
    let run: BTreeMap<System, Arc<Metrics>> = systems.iter().map(|&s| (s, Arc::new(Metrics::new()))).collect();
    let jobs: Vec<(usize, System)> = (0..corpus.len())
        .flat_map(|i| systems.iter().map(move |&s| (i, s)))
        .collect();
    let slots: Mutex<Vec<Option<Cell>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let threads = match cfg.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(jobs.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, system)) = jobs.get(j) else { break };
                let cell = run_cell(&corpus[i], system, g, kb, cfg, run[&system].clone());
                slots.lock().unwrap()[j] = Some(cell);
            });
        }
    });

    let cells = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|c| c.expect("every job ran"))
        .collect();
    MetricsTable {
        systems: systems.to_vec(),
        cells,
        totals: run.iter().map(|(&s, m)| (s, m.snapshot())).collect(),
    }
}

fn run_cell(s: &Sentence, system: System, g: &Grammar, kb: &Kb, cfg: &BenchConfig, run: Arc<Metrics>) -> Cell {
    let metrics = Metrics::with_parent(run);
    let tokens = s.token_refs();
    let start = Instant::now();
    let outcome = system.parse(&tokens, g, kb, &cfg.parse, &cfg.chart, &metrics);
    let wall = cfg.wall_time.then(|| start.elapsed().as_millis() as u64);
    let spent = metrics.snapshot();
    let (record, error) = match outcome {
        Ok(r) => {
            let mut m = r.metrics;
            m.wall_time_ms = wall;
            (Some(m), None)
        }
        Err(e) => {
            log::warn!("sentence {} on {system}: {e}", s.id);
            (None, Some(e.to_string()))
        }
    };
    Cell {
        sentence_id: s.id,
        tokens: s.tokens.len(),
        system,
        record,
        spent,
        error,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Syntax,
    Concept,
}

impl Check {
    pub const ALL: [Check; 2] = [Check::Syntax, Check::Concept];

    pub fn id(self) -> &'static str {
        match self {
            Check::Syntax => "syntax_checks",
            Check::Concept => "concept_checks",
        }
    }

    pub fn of(self, m: &MetricsRecord) -> u64 {
        match self {
            Check::Syntax => m.syntax_checks,
            Check::Concept => m.concept_checks,
        }
    }
}

/// Unweighted mean over sentences of `baseline / engine` for one check
/// type. Sentences where either cell is absent or the engine made no such
/// call are left out; `None` if none remain.
pub fn reduction_factor(table: &MetricsTable, baseline: System, engine: System, check: Check) -> Option<f64> {
    let ratios: Vec<f64> = table
        .sentence_ids()
        .into_iter()
        .filter_map(|id| {
            let b = table.cell(id, baseline)?.record.as_ref()?;
            let e = table.cell(id, engine)?.record.as_ref()?;
            let (b, e) = (check.of(b), check.of(e));
            (e > 0).then(|| b as f64 / e as f64)
        })
        .collect();
    (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(id: usize, system: System, syntax: Option<u64>) -> Cell {
        let record = syntax.map(|s| MetricsRecord {
            syntax_checks: s,
            concept_checks: s / 2,
            ..Default::default()
        });
        Cell {
            sentence_id: id,
            tokens: 3,
            system,
            record,
            spent: record.unwrap_or_default(),
            error: None,
        }
    }

    #[test]
    fn system_ids_round_trip() {
        for s in System::ALL {
            assert_eq!(s.id().parse::<System>().unwrap(), s);
        }
        assert!(parse_systems("engine-restricted,chart").is_err());
        assert_eq!(
            parse_systems("engine-restricted, chart-standard").unwrap(),
            [System::EngineRestricted, System::ChartStandard]
        );
    }

    #[test]
    fn reduction_is_an_unweighted_mean_skipping_absent_cells() {
        let (e, c) = (System::EngineRestricted, System::ChartStandard);
        let table = MetricsTable {
            systems: vec![e, c],
            cells: vec![
                cell(1, e, Some(10)),
                cell(1, c, Some(20)),
                cell(2, e, Some(100)),
                cell(2, c, Some(600)),
                cell(3, e, Some(10)),
                cell(3, c, None),
            ],
            totals: BTreeMap::new(),
        };
        assert_eq!(reduction_factor(&table, c, e, Check::Syntax), Some(4.0));
        assert_eq!(
            reduction_factor(&table, e, c, Check::Syntax),
            Some((0.5 + 1.0 / 6.0) / 2.0)
        );
        assert_eq!(
            reduction_factor(&table, c, System::EngineExhaustive, Check::Syntax),
            None
        );
    }
}
