//! C_p sweeps: many independent MCTS runs per grid point, written as CSV.
//!
//! A "dot" is one run of `repetitions` MCTS searches whose best result is
//! recorded. Dots are independent, so they run on a thread pool; the rows are
//! sorted by `(C_p index, direction, dot)` before writing, so the output does
//! not depend on the number of workers.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::expr::Polynomial;
use crate::horner::Direction;
use crate::report::Strategy;
use crate::search::{mcts, rng::derive_seed, Criterion, Evaluator, SearchConfig};

pub const CSV_HEADER: [&str; 11] = [
    "strategy",
    "C_p",
    "N",
    "R",
    "direction",
    "seed",
    "ops_total",
    "ops_muls",
    "ops_adds",
    "best_scheme",
    "wall_seconds",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub criterion: Criterion,
    pub cp_min: f64,
    pub cp_max: f64,
    pub points: usize,
    pub iterations: u64,
    pub repetitions: u32,
    pub dots: u32,
    pub directions: Vec<Direction>,
    pub seed: u64,
    /// Record real elapsed time per dot. Off by default so output is reproducible.
    pub timing: bool,
}

impl SweepSpec {
    pub fn new(criterion: Criterion, cp_min: f64, cp_max: f64, points: usize) -> Self {
        SweepSpec {
            criterion,
            cp_min,
            cp_max,
            points,
            iterations: 1000,
            repetitions: 1,
            dots: 1,
            directions: vec![Direction::Forward],
            seed: 0,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.cp_min > 0.0 && self.cp_min.is_finite() && self.cp_max.is_finite()) {
            return bad("C_p bounds must be positive and finite");
        }
        if self.cp_max < self.cp_min {
            return bad("cp-max must not be below cp-min");
        }
        if self.points == 0 || self.dots == 0 || self.repetitions == 0 || self.iterations == 0 {
            return bad("points, dots, repetitions and iterations must be positive");
        }
        if self.directions.is_empty() {
            return bad("at least one direction is required");
        }
        Ok(())
    }

    /// Geometric grid from `cp_min` to `cp_max`, both included.
    pub fn grid(&self) -> Vec<f64> {
        geometric_grid(self.cp_min, self.cp_max, self.points)
    }
}

pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { hi } else { round_sig(lo * (ratio * i as f64).exp()) })
                .collect()
        }
    }
}

/// Rounds to 12 significant digits so grid values print cleanly.
fn round_sig(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub strategy: String,
    #[serde(rename = "C_p")]
    pub cp: f64,
    #[serde(rename = "N")]
    pub iterations: u64,
    #[serde(rename = "R")]
    pub repetitions: u32,
    pub direction: Direction,
    pub seed: u64,
    pub ops_total: u64,
    pub ops_muls: u64,
    pub ops_adds: u64,
    pub best_scheme: String,
    pub wall_seconds: f64,
}

struct Job {
    cp_index: usize,
    dir_index: usize,
    dot: u32,
    cp: f64,
    direction: Direction,
    seed: u64,
}

fn run_dot(p: &Polynomial, spec: &SweepSpec, job: &Job) -> Result<SweepRecord, Error> {
    let start = Instant::now();
    let ev = Evaluator::new(p)?;
    let mut best: Option<crate::search::SearchResult> = None;
    for rep in 0..spec.repetitions {
        let cfg = SearchConfig {
            criterion: spec.criterion,
            cp: job.cp,
            iterations: spec.iterations,
            direction: job.direction,
            seed: derive_seed(job.seed, &[u64::from(rep)]),
            trace: false,
        };
        let (r, _) = mcts::run(&ev, &cfg);
        let better = match &best {
            None => true,
            Some(b) => (r.best_ops.total(), &r.best_scheme.order) < (b.best_ops.total(), &b.best_scheme.order),
        };
        if better {
            best = Some(r);
        }
    }
    let best = best.expect("at least one repetition");
    let wall = if spec.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    Ok(SweepRecord {
        strategy: Strategy::from_criterion(spec.criterion).as_str().to_string(),
        cp: job.cp,
        iterations: spec.iterations,
        repetitions: spec.repetitions,
        direction: job.direction,
        seed: job.seed,
        ops_total: best.best_ops.total(),
        ops_muls: best.best_ops.muls,
        ops_adds: best.best_ops.adds,
        best_scheme: best.best_scheme.names(p.vars()),
        wall_seconds: wall,
    })
}

/// Runs every dot of the sweep on `jobs` worker threads.
pub fn run_sweep(p: &Polynomial, spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRecord>, Error> {
    spec.validate()?;
    SearchConfig {
        criterion: spec.criterion,
        cp: spec.cp_min,
        iterations: spec.iterations,
        direction: Direction::Forward,
        seed: 0,
        trace: false,
    }
    .validate()?;
    Evaluator::new(p)?;

    let grid = spec.grid();
    let mut work = Vec::new();
    for (cp_index, &cp) in grid.iter().enumerate() {
        for (dir_index, &direction) in spec.directions.iter().enumerate() {
            for dot in 0..spec.dots {
                let seed = derive_seed(spec.seed, &[cp_index as u64, dir_index as u64, u64::from(dot)]);
                work.push(Job {
                    cp_index,
                    dir_index,
                    dot,
                    cp,
                    direction,
                    seed,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let mut rows: Vec<((usize, usize, u32), SweepRecord)> = pool.install(|| {
        work.par_iter()
            .map(|job| run_dot(p, spec, job).map(|r| ((job.cp_index, job.dir_index, job.dot), r)))
            .collect::<Result<Vec<_>, Error>>()
    })?;
    rows.sort_by_key(|(k, _)| *k);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<(), Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>, Error> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidConfig(format!(
            "unexpected sweep header '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(rdr.deserialize().collect::<Result<Vec<_>, _>>()?)
}

/// Median `ops_total` of the dots at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub cp: f64,
    pub median: f64,
    pub best: u64,
}

/// Groups records by `C_p` (in order of first appearance) and takes medians.
pub fn grid_medians(records: &[SweepRecord]) -> Vec<GridPoint> {
    let mut groups: Vec<(f64, Vec<u64>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(cp, _)| *cp == r.cp) {
            Some((_, v)) => v.push(r.ops_total),
            None => groups.push((r.cp, vec![r.ops_total])),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    groups
        .into_iter()
        .map(|(cp, mut v)| {
            v.sort_unstable();
            let n = v.len();
            let median = if n % 2 == 1 {
                v[n / 2] as f64
            } else {
                (v[n / 2 - 1] as f64 + v[n / 2] as f64) / 2.0
            };
            GridPoint {
                cp,
                median,
                best: v[0],
            }
        })
        .collect()
}

/// Widest run of consecutive grid points whose median is within `tolerance`
/// (relative) of `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodRegion {
    pub first: usize,
    pub last: usize,
    /// Lower edge of the first point's cell.
    pub lo: f64,
    /// Upper edge of the last point's cell.
    pub hi: f64,
}

impl GoodRegion {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn points(&self) -> usize {
        self.last - self.first + 1
    }
}

/// Each grid point owns the cell between the geometric midpoints to its
/// neighbours; the outer cells extend by the same half ratio. The region's
/// width is the linear extent of the union of its cells.
pub fn good_region(points: &[GridPoint], target: u64, tolerance: f64) -> Option<GoodRegion> {
    let limit = target as f64 * (1.0 + tolerance);
    let n = points.len();
    let half = if n >= 2 {
        ((points[n - 1].cp / points[0].cp).ln() / (n - 1) as f64 / 2.0).exp()
    } else {
        1.0
    };
    let mut best: Option<GoodRegion> = None;
    let mut i = 0;
    while i < n {
        if points[i].median > limit {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && points[j + 1].median <= limit {
            j += 1;
        }
        let region = GoodRegion {
            first: i,
            last: j,
            lo: points[i].cp / half,
            hi: points[j].cp * half,
        };
        if best.is_none_or(|b| region.width() > b.width()) {
            best = Some(region);
        }
        i = j + 1;
    }
    best
}
