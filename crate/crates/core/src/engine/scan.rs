//! Exhaustive CHSH search over candidate meeting points or station phases.

use rayon::prelude::*;

use super::{
    chsh_combination, chsh_value, compute_phases, evaluate, ChshSettings, Contour,
    CorrelationRecord, EngineError, ExperimentLayout, PhaseQuadruple,
};
use crate::geometry::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    /// Evaluate candidates on the rayon pool. Results do not depend on it.
    pub parallel: bool,
    /// Keep every evaluated combination in [`ScanOutcome::table`].
    pub keep_table: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            parallel: true,
            keep_table: true,
        }
    }
}

/// One `(A, A′, B, B′)` combination. Indices refer to the input loci.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub a_index: usize,
    pub a_prime_index: usize,
    pub b_index: usize,
    pub b_prime_index: usize,
    pub phi_a: f64,
    pub phi_a_prime: f64,
    pub phi_b: f64,
    pub phi_b_prime: f64,
    pub e_ab: f64,
    pub e_abp: f64,
    pub e_apb: f64,
    pub e_apbp: f64,
    pub s: f64,
}

/// A locus point left out of the scan because one of its contours is invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCandidate {
    pub locus: &'static str,
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    /// First combination reaching the largest `|S|`.
    pub best: ScanRow,
    /// Full pipeline record of the best combination.
    pub best_record: CorrelationRecord,
    /// Every combination in lexicographic index order; empty unless
    /// [`ScanOptions::keep_table`] is set.
    pub table: Vec<ScanRow>,
    pub evaluated: usize,
    pub skipped: Vec<SkippedCandidate>,
}

/// Correlators for every (A candidate, B candidate) pair.
struct CorrelatorGrid {
    a_index: Vec<usize>,
    b_index: Vec<usize>,
    phi_a: Vec<f64>,
    phi_b: Vec<f64>,
    e: Vec<Vec<f64>>,
}

impl CorrelatorGrid {
    fn row(&self, i: usize, ip: usize, j: usize, jp: usize) -> ScanRow {
        let e = [self.e[i][j], self.e[i][jp], self.e[ip][j], self.e[ip][jp]];
        ScanRow {
            a_index: self.a_index[i],
            a_prime_index: self.a_index[ip],
            b_index: self.b_index[j],
            b_prime_index: self.b_index[jp],
            phi_a: self.phi_a[i],
            phi_a_prime: self.phi_a[ip],
            phi_b: self.phi_b[j],
            phi_b_prime: self.phi_b[jp],
            e_ab: e[0],
            e_abp: e[1],
            e_apb: e[2],
            e_apbp: e[3],
            s: chsh_combination(e),
        }
    }

    /// Rows whose first index is `i`, in lexicographic order.
    fn rows_from(&self, i: usize) -> impl Iterator<Item = ScanRow> + '_ {
        let (na, nb) = (self.a_index.len(), self.b_index.len());
        (0..na).filter(move |&ip| ip != i).flat_map(move |ip| {
            (0..nb).flat_map(move |j| {
                (0..nb)
                    .filter(move |&jp| jp != j)
                    .map(move |jp| self.row(i, ip, j, jp))
            })
        })
    }

    fn combinations(&self) -> usize {
        let (na, nb) = (self.a_index.len(), self.b_index.len());
        na * (na - 1) * nb * (nb - 1)
    }

    fn search(&self, opts: ScanOptions) -> (ScanRow, Vec<ScanRow>) {
        let na = self.a_index.len();
        if opts.keep_table {
            let chunks: Vec<Vec<ScanRow>> = if opts.parallel {
                (0..na)
                    .into_par_iter()
                    .map(|i| self.rows_from(i).collect())
                    .collect()
            } else {
                (0..na).map(|i| self.rows_from(i).collect()).collect()
            };
            let table: Vec<ScanRow> = chunks.into_iter().flatten().collect();
            let best = first_maximal(table.iter().copied()).expect("non-empty scan");
            (best, table)
        } else {
            let bests: Vec<Option<ScanRow>> = if opts.parallel {
                (0..na)
                    .into_par_iter()
                    .map(|i| first_maximal(self.rows_from(i)))
                    .collect()
            } else {
                (0..na).map(|i| first_maximal(self.rows_from(i))).collect()
            };
            let best = first_maximal(bests.into_iter().flatten()).expect("non-empty scan");
            (best, Vec::new())
        }
    }
}

/// First row with the largest `|S|` in iteration order.
fn first_maximal(rows: impl Iterator<Item = ScanRow>) -> Option<ScanRow> {
    rows.fold(None, |best: Option<ScanRow>, row| match best {
        Some(b) if row.s.abs() <= b.s.abs() => Some(b),
        _ => Some(row),
    })
}

fn map_maybe_parallel<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

/// Searches every `(A, A′, B, B′)` with `A ≠ A′` drawn from `locus_a` and
/// `B ≠ B′` drawn from `locus_b`, keeping the first combination with the
/// largest `|S|`. Candidates whose contours fail validation are skipped.
pub fn scan_chsh_over_locations(
    layout: &ExperimentLayout,
    locus_a: &[Point2],
    locus_b: &[Point2],
    opts: ScanOptions,
) -> Result<ScanOutcome, EngineError> {
    let mut skipped = Vec::new();
    let a_ok = valid_candidates(layout, locus_a, "A", &mut skipped);
    let b_ok = valid_candidates(layout, locus_b, "B", &mut skipped);
    if a_ok.len() < 2 {
        return Err(EngineError::InsufficientLocus {
            locus: "A",
            valid: a_ok.len(),
        });
    }
    if b_ok.len() < 2 {
        return Err(EngineError::InsufficientLocus {
            locus: "B",
            valid: b_ok.len(),
        });
    }

    // per A candidate: correlators against each B, phi_B of each B, phi_A
    type Row = (Vec<f64>, Vec<f64>, f64);
    let rows: Vec<Result<Row, EngineError>> = map_maybe_parallel(&a_ok, opts.parallel, |&ia| {
        let mut es = Vec::with_capacity(b_ok.len());
        let mut phi_bs = Vec::with_capacity(b_ok.len());
        let mut phi_a = 0.0;
        for &jb in &b_ok {
            let phases = compute_phases(&layout.with_meetings(locus_a[ia], locus_b[jb]))?;
            phi_a = phases.phi_a().radians();
            phi_bs.push(phases.phi_b().radians());
            es.push(evaluate(&phases)?.0);
        }
        Ok((es, phi_bs, phi_a))
    });
    let mut e = Vec::with_capacity(a_ok.len());
    let mut phi_a = Vec::with_capacity(a_ok.len());
    let mut phi_b = Vec::new();
    for row in rows {
        let (es, phi_bs, pa) = row?;
        e.push(es);
        phi_a.push(pa);
        phi_b = phi_bs;
    }
    let grid = CorrelatorGrid {
        a_index: a_ok,
        b_index: b_ok,
        phi_a,
        phi_b,
        e,
    };
    let (best, table) = grid.search(opts);
    let settings = ChshSettings::Geometric {
        a: locus_a[best.a_index],
        a_prime: locus_a[best.a_prime_index],
        b: locus_b[best.b_index],
        b_prime: locus_b[best.b_prime_index],
    };
    Ok(ScanOutcome {
        best,
        best_record: chsh_value(&settings, Some(layout))?,
        table,
        evaluated: grid.combinations(),
        skipped,
    })
}

fn valid_candidates(
    layout: &ExperimentLayout,
    locus: &[Point2],
    name: &'static str,
    skipped: &mut Vec<SkippedCandidate>,
) -> Vec<usize> {
    let contours = if name == "A" {
        [Contour::CToA, Contour::DToA]
    } else {
        [Contour::CToB, Contour::DToB]
    };
    let mut ok = Vec::new();
    for (index, p) in locus.iter().enumerate() {
        let variant = layout.with_meetings(*p, *p);
        match contours
            .iter()
            .try_for_each(|c| variant.checked_contour(*c).map(|_| ()))
        {
            Ok(()) => ok.push(index),
            Err(e) => skipped.push(SkippedCandidate {
                locus: name,
                index,
                reason: e.to_string(),
            }),
        }
    }
    ok
}

/// Same search with the station phases given directly.
pub fn scan_chsh_over_phases(
    phases_a: &[f64],
    phases_b: &[f64],
    opts: ScanOptions,
) -> Result<ScanOutcome, EngineError> {
    if phases_a.len() < 2 {
        return Err(EngineError::InsufficientLocus {
            locus: "A",
            valid: phases_a.len(),
        });
    }
    if phases_b.len() < 2 {
        return Err(EngineError::InsufficientLocus {
            locus: "B",
            valid: phases_b.len(),
        });
    }
    let rows: Vec<Result<Vec<f64>, EngineError>> =
        map_maybe_parallel(phases_a, opts.parallel, |&pa| {
            phases_b
                .iter()
                .map(|&pb| {
                    let phases = PhaseQuadruple::from_station_phases(pa, pb).map_err(|source| {
                        EngineError::Geometry {
                            contour: Contour::CToA,
                            source,
                        }
                    })?;
                    Ok(evaluate(&phases)?.0)
                })
                .collect()
        });
    let e = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let grid = CorrelatorGrid {
        a_index: (0..phases_a.len()).collect(),
        b_index: (0..phases_b.len()).collect(),
        phi_a: phases_a.to_vec(),
        phi_b: phases_b.to_vec(),
        e,
    };
    let (best, table) = grid.search(opts);
    let settings = ChshSettings::Direct {
        phi_a: best.phi_a,
        phi_a_prime: best.phi_a_prime,
        phi_b: best.phi_b,
        phi_b_prime: best.phi_b_prime,
    };
    Ok(ScanOutcome {
        best,
        best_record: chsh_value(&settings, None)?,
        table,
        evaluated: grid.combinations(),
        skipped: Vec::new(),
    })
}
