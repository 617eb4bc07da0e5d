//! The d×d discrete phase space over GF(d).
//!
//! Lines are affine lines of the plane GF(d)²: striation 0 holds the vertical
//! lines `x = c`, striation `1 + idx(m)` holds the lines `y = m·x + b` of slope
//! `m`. Within a striation, line ids follow the canonical index of `c` or `b`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{enumerate, FieldElement, FieldSpec};

/// A point `(x, y)` of the grid; `index = d·idx(x) + idx(y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePoint {
    pub x: FieldElement,
    pub y: FieldElement,
    pub index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Line {
    pub striation_id: usize,
    pub line_id: usize,
    /// Point indices, in ascending order of the parameter along the line.
    pub points: Vec<usize>,
}

impl Line {
    pub fn contains(&self, point: usize) -> bool {
        self.points.contains(&point)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Striation {
    pub id: usize,
    pub lines: Vec<Line>,
}

#[derive(Clone, Debug)]
pub struct PhaseSpace {
    spec: Arc<FieldSpec>,
    points: Vec<PhasePoint>,
    striations: Vec<Striation>,
    /// `incidence[point][striation]` is the id of the line of that striation
    /// through the point.
    incidence: Vec<Vec<usize>>,
}

/// Outcome of the exhaustive incidence checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    /// Every pair of distinct points lies on exactly one common line.
    pub unique_joining_line: bool,
    /// Through a point off a line passes exactly one parallel line.
    pub unique_parallel: bool,
    /// Lines of different striations meet in exactly one point.
    pub non_parallel_meet_once: bool,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.unique_joining_line && self.unique_parallel && self.non_parallel_meet_once
    }
}

impl PhaseSpace {
    pub fn build(spec: &Arc<FieldSpec>) -> Self {
        let d = spec.order();
        let elems = enumerate(spec);
        let points: Vec<PhasePoint> = elems
            .iter()
            .flat_map(|x| {
                elems.iter().map(move |y| PhasePoint { x: x.clone(), y: y.clone(), index: d * x.index() + y.index() })
            })
            .collect();

        let mut striations = Vec::with_capacity(d + 1);
        striations.push(Striation {
            id: 0,
            lines: elems
                .iter()
                .map(|c| Line {
                    striation_id: 0,
                    line_id: c.index(),
                    points: elems.iter().map(|y| d * c.index() + y.index()).collect(),
                })
                .collect(),
        });
        for m in &elems {
            let id = 1 + m.index();
            let lines = elems
                .iter()
                .map(|b| Line {
                    striation_id: id,
                    line_id: b.index(),
                    points: elems.iter().map(|x| d * x.index() + (&(m * x) + b).index()).collect(),
                })
                .collect();
            striations.push(Striation { id, lines });
        }

        let mut incidence = vec![vec![usize::MAX; d + 1]; d * d];
        for s in &striations {
            for l in &s.lines {
                for &pt in &l.points {
                    incidence[pt][s.id] = l.line_id;
                }
            }
        }

        Self { spec: Arc::clone(spec), points, striations, incidence }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.order()
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Option<&PhasePoint> {
        self.points.get(index)
    }

    pub fn striations(&self) -> &[Striation] {
        &self.striations
    }

    pub fn lines(&self) -> impl Iterator<Item = &Line> {
        self.striations.iter().flat_map(|s| s.lines.iter())
    }

    pub fn line(&self, striation: usize, line: usize) -> &Line {
        &self.striations[striation].lines[line]
    }

    /// Line ids through the point with the given index, one per striation.
    pub fn incidence(&self, point: usize) -> &[usize] {
        &self.incidence[point]
    }

    fn locate(&self, point: &PhasePoint) -> Result<usize> {
        let known = self.points.get(point.index).ok_or(Error::ForeignPoint)?;
        if known != point {
            return Err(Error::ForeignPoint);
        }
        Ok(point.index)
    }

    /// The d+1 lines through `point`, ordered by striation id.
    pub fn lines_through(&self, point: &PhasePoint) -> Result<Vec<&Line>> {
        let idx = self.locate(point)?;
        Ok(self.incidence[idx].iter().enumerate().map(|(s, &l)| self.line(s, l)).collect())
    }

    /// Exhaustive check of the three incidence axioms.
    pub fn verify_axioms(&self) -> AxiomReport {
        let d = self.dimension();
        let npts = d * d;
        let words = npts.div_ceil(64);
        let masks: Vec<(usize, Vec<u64>)> = self
            .lines()
            .map(|l| {
                let mut m = vec![0u64; words];
                for &p in &l.points {
                    m[p / 64] |= 1 << (p % 64);
                }
                (l.striation_id, m)
            })
            .collect();
        let has = |m: &[u64], p: usize| m[p / 64] >> (p % 64) & 1 == 1;
        let well_formed = masks.len() == d * (d + 1)
            && self.lines().all(|l| {
                let mut pts = l.points.clone();
                pts.sort_unstable();
                pts.dedup();
                pts.len() == d
            });

        let mut unique_joining_line = well_formed;
        for a in 0..npts {
            for b in a + 1..npts {
                let common = masks.iter().filter(|(_, m)| has(m, a) && has(m, b)).count();
                unique_joining_line &= common == 1;
            }
        }

        let mut unique_parallel = well_formed;
        for a in 0..npts {
            for (sid, m) in &masks {
                if has(m, a) {
                    continue;
                }
                let through = masks.iter().filter(|(s, other)| s == sid && has(other, a)).count();
                unique_parallel &= through == 1;
            }
        }

        let mut non_parallel_meet_once = well_formed;
        for (i, (si, mi)) in masks.iter().enumerate() {
            for (sj, mj) in &masks[i + 1..] {
                if si == sj {
                    continue;
                }
                let meet: u32 = mi.iter().zip(mj).map(|(x, y)| (x & y).count_ones()).sum();
                non_parallel_meet_once &= meet == 1;
            }
        }

        AxiomReport { unique_joining_line, unique_parallel, non_parallel_meet_once }
    }
}
