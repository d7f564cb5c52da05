//! Partial configuration grids and the square-completion primitives.
//!
//! A configuration assigns to every plane position `(k, l)` with `k < l` a
//! vertex at level `n(k,l) = l-k-1` together with the `E⁻` edge entering it
//! from `(k-1, l)` and the `E⁺` edge leaving it to `(k, l+1)`.  A [`Grid`]
//! stores a finite fragment of such an assignment, keyed by position:
//! `eminus[(k,l)]` is the edge from `(k-1,l)` into `(k,l)` and `eplus[(k,l)]`
//! the edge from `(k,l)` to `(k,l+1)`.  Insertions check consistency against
//! already-present neighbours, so a grid can only ever describe a legal
//! fragment.

use crate::alphabet::Sym;
use crate::bisystem::{LambdaBiSystem, MinusRef, PlusRef};
use crate::error::{LgbsError, Result};
use std::collections::BTreeMap;

pub type Pos = (i64, i64);

/// Level of a plane position.
pub fn level_of(pos: Pos) -> Result<usize> {
    let (k, l) = pos;
    if k >= l {
        return Err(LgbsError::InvalidBisystem(format!("position ({k},{l}) needs k < l")));
    }
    Ok((l - k - 1) as usize)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grid {
    vertex: BTreeMap<Pos, usize>,
    eminus: BTreeMap<Pos, usize>,
    eplus: BTreeMap<Pos, usize>,
}

impl Grid {
    pub fn new() -> Grid {
        Grid::default()
    }

    pub fn vertex(&self, pos: Pos) -> Option<usize> {
        self.vertex.get(&pos).copied()
    }

    pub fn eminus(&self, pos: Pos) -> Option<MinusRef> {
        let low = level_of(pos).ok()?;
        self.eminus.get(&pos).map(|&idx| MinusRef { low, idx })
    }

    pub fn eplus(&self, pos: Pos) -> Option<PlusRef> {
        let low = level_of(pos).ok()?;
        self.eplus.get(&pos).map(|&idx| PlusRef { low, idx })
    }

    pub fn positions(&self) -> impl Iterator<Item = Pos> + '_ {
        self.vertex.keys().copied()
    }

    pub fn set_vertex(&mut self, pos: Pos, v: usize) -> Result<()> {
        level_of(pos)?;
        match self.vertex.get(&pos) {
            Some(&old) if old != v => Err(LgbsError::InconsistentBisystem(format!(
                "vertex conflict at {pos:?}: {old} vs {v}"
            ))),
            _ => {
                self.vertex.insert(pos, v);
                Ok(())
            }
        }
    }

    /// Install the `E⁻` edge entering `pos`, propagating its endpoints.
    pub fn set_eminus(&mut self, b: &LambdaBiSystem, pos: Pos, r: MinusRef) -> Result<()> {
        let low = level_of(pos)?;
        if r.low != low {
            return Err(LgbsError::InconsistentBisystem(format!(
                "E- edge at {pos:?} has level {} instead of {low}",
                r.low
            )));
        }
        let e = b.minus_edge(r)?;
        match self.eminus.get(&pos) {
            Some(&old) if old != r.idx => {
                return Err(LgbsError::InconsistentBisystem(format!(
                    "E- edge conflict at {pos:?}"
                )))
            }
            _ => {}
        }
        self.set_vertex(pos, e.tgt as usize)?;
        self.set_vertex((pos.0 - 1, pos.1), e.src as usize)?;
        self.eminus.insert(pos, r.idx);
        Ok(())
    }

    /// Install the `E⁺` edge leaving `pos`, propagating its endpoints.
    pub fn set_eplus(&mut self, b: &LambdaBiSystem, pos: Pos, r: PlusRef) -> Result<()> {
        let low = level_of(pos)?;
        if r.low != low {
            return Err(LgbsError::InconsistentBisystem(format!(
                "E+ edge at {pos:?} has level {} instead of {low}",
                r.low
            )));
        }
        let e = b.plus_edge(r)?;
        match self.eplus.get(&pos) {
            Some(&old) if old != r.idx => {
                return Err(LgbsError::InconsistentBisystem(format!(
                    "E+ edge conflict at {pos:?}"
                )))
            }
            _ => {}
        }
        self.set_vertex(pos, e.src as usize)?;
        self.set_vertex((pos.0, pos.1 + 1), e.tgt as usize)?;
        self.eplus.insert(pos, r.idx);
        Ok(())
    }

    /// Row label `x_k`, read from any `E⁻` edge entering row `k`.
    pub fn row_label(&self, b: &LambdaBiSystem, k: i64) -> Option<Sym> {
        let (&pos, &idx) = self.eminus.range((k, i64::MIN)..=(k, i64::MAX)).next()?;
        let low = level_of(pos).ok()?;
        b.minus_edge(MinusRef { low, idx }).ok().map(|e| e.label)
    }

    /// Column label `x_l`, read from any `E⁺` edge leaving column `l`.
    pub fn col_label(&self, b: &LambdaBiSystem, l: i64) -> Option<Sym> {
        for (&pos, &idx) in &self.eplus {
            if pos.1 == l {
                let low = level_of(pos).ok()?;
                return b.plus_edge(PlusRef { low, idx }).ok().map(|e| e.label);
            }
        }
        None
    }

    /// The sub-grid of all positions within the triangle `a <= k < l <= c`,
    /// with edges kept only when both endpoints stay inside.
    pub fn restrict_triangle(&self, a: i64, c: i64) -> Grid {
        let keep = |pos: &Pos| pos.0 >= a && pos.1 <= c;
        let mut g = Grid::new();
        for (pos, &v) in &self.vertex {
            if keep(pos) {
                g.vertex.insert(*pos, v);
            }
        }
        for (pos, &i) in &self.eminus {
            if keep(pos) && pos.0 - 1 >= a {
                g.eminus.insert(*pos, i);
            }
        }
        for (pos, &i) in &self.eplus {
            if keep(pos) && pos.1 + 1 <= c {
                g.eplus.insert(*pos, i);
            }
        }
        g
    }

    /// The sub-grid of the rectangle `k <= p, l >= q` clipped to the window
    /// extents (`height` rows below `p`, `width` columns right of `q`).
    pub fn restrict_rectangle(&self, corner: Pos, height: usize, width: usize) -> Grid {
        let (p, q) = corner;
        let keep = |pos: &Pos| {
            pos.0 <= p && pos.0 >= p - height as i64 && pos.1 >= q && pos.1 <= q + width as i64
        };
        let mut g = Grid::new();
        for (pos, &v) in &self.vertex {
            if keep(pos) {
                g.vertex.insert(*pos, v);
            }
        }
        for (pos, &i) in &self.eminus {
            if keep(pos) && pos.0 - 1 >= p - height as i64 {
                g.eminus.insert(*pos, i);
            }
        }
        for (pos, &i) in &self.eplus {
            if keep(pos) && pos.1 + 1 <= q + width as i64 {
                g.eplus.insert(*pos, i);
            }
        }
        g
    }

    /// Check that every position in the region has its vertex present.
    pub fn covers_triangle(&self, a: i64, c: i64) -> bool {
        for k in a..c {
            for l in (k + 1)..=c {
                if !self.vertex.contains_key(&(k, l)) {
                    return false;
                }
            }
        }
        true
    }

    /// Verify the boundary-label constancy of a legal configuration
    /// fragment: `E⁻` labels constant along rows, `E⁺` labels constant along
    /// columns.
    pub fn validate_labels(&self, b: &LambdaBiSystem) -> Result<()> {
        let mut rows: BTreeMap<i64, Sym> = BTreeMap::new();
        for (&pos, &idx) in &self.eminus {
            let e = b.minus_edge(MinusRef { low: level_of(pos)?, idx })?;
            if let Some(&prev) = rows.get(&pos.0) {
                if prev != e.label {
                    return Err(LgbsError::InconsistentBisystem(format!(
                        "row {} carries two E- labels",
                        pos.0
                    )));
                }
            }
            rows.insert(pos.0, e.label);
        }
        let mut cols: BTreeMap<i64, Sym> = BTreeMap::new();
        for (&pos, &idx) in &self.eplus {
            let e = b.plus_edge(PlusRef { low: level_of(pos)?, idx })?;
            if let Some(&prev) = cols.get(&pos.1) {
                if prev != e.label {
                    return Err(LgbsError::InconsistentBisystem(format!(
                        "column {} carries two E+ labels",
                        pos.1
                    )));
                }
            }
            cols.insert(pos.1, e.label);
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Square completion (the local property as an operation)
// ---------------------------------------------------------------------------

/// Complete an outer corner to its inner corner: given `f⁺` out of `u` and
/// `f⁻` out of `v` meeting at a common target, produce the edges `(e⁻, e⁺)`
/// through the matched middle vertex, preserving labels.
pub fn complete_square_out(
    b: &LambdaBiSystem,
    f_plus: PlusRef,
    f_minus: MinusRef,
) -> Result<(MinusRef, PlusRef)> {
    if f_minus.low != f_plus.low + 1 {
        return Err(LgbsError::NoSquare(format!(
            "levels {} and {} do not form a corner",
            f_plus.low, f_minus.low
        )));
    }
    let low = f_plus.low;
    let fp = b.plus_edge(f_plus)?;
    let fm = b.minus_edge(f_minus)?;
    if fp.tgt != fm.tgt {
        return Err(LgbsError::NoSquare(format!(
            "edges do not meet: {} vs {}",
            b.vertex_id(low + 1, fp.tgt as usize),
            b.vertex_id(low + 1, fm.tgt as usize)
        )));
    }
    if let Some(phi) = b.phi() {
        let entry = phi
            .iter()
            .find(|e| e.low == low && e.f_plus == f_plus.idx && e.f_minus == f_minus.idx)
            .ok_or_else(|| LgbsError::NoSquare(format!("phi has no entry for this corner at level {low}")))?;
        return Ok((MinusRef { low, idx: entry.e_minus }, PlusRef { low: low + 1, idx: entry.e_plus }));
    }
    let e_plus = b
        .plus_into(low + 1, fm.src as usize, fp.label)?
        .ok_or_else(|| {
            LgbsError::NoSquare(format!(
                "no E+ edge labeled {} into {}",
                b.alphabet.name(fp.label),
                b.vertex_id(low + 2, fm.src as usize)
            ))
        })?;
    let mid = b.plus_edge(e_plus)?.src as usize;
    let e_minus = b.minus_out(low, mid, fm.label)?.ok_or_else(|| {
        LgbsError::NoSquare(format!(
            "no E- edge labeled {} out of {}",
            b.alphabet.name(fm.label),
            b.vertex_id(low + 1, mid)
        ))
    })?;
    if b.minus_edge(e_minus)?.tgt != fp.src {
        return Err(LgbsError::NoSquare("completed square does not close on u".into()));
    }
    Ok((e_minus, e_plus))
}

/// Complete an inner corner to its outer corner: the inverse of
/// [`complete_square_out`].
pub fn complete_square_in(
    b: &LambdaBiSystem,
    e_minus: MinusRef,
    e_plus: PlusRef,
) -> Result<(PlusRef, MinusRef)> {
    if e_plus.low != e_minus.low + 1 {
        return Err(LgbsError::NoSquare(format!(
            "levels {} and {} do not form a corner",
            e_minus.low, e_plus.low
        )));
    }
    let low = e_minus.low;
    let em = b.minus_edge(e_minus)?;
    let ep = b.plus_edge(e_plus)?;
    if em.src != ep.src {
        return Err(LgbsError::NoSquare("edges do not share a source".into()));
    }
    if let Some(phi) = b.phi() {
        let entry = phi
            .iter()
            .find(|e| e.low == low && e.e_minus == e_minus.idx && e.e_plus == e_plus.idx)
            .ok_or_else(|| LgbsError::NoSquare(format!("phi has no entry for this corner at level {low}")))?;
        return Ok((PlusRef { low, idx: entry.f_plus }, MinusRef { low: low + 1, idx: entry.f_minus }));
    }
    let f_minus = b
        .minus_out(low + 1, ep.tgt as usize, em.label)?
        .ok_or_else(|| {
            LgbsError::NoSquare(format!(
                "no E- edge labeled {} out of {}",
                b.alphabet.name(em.label),
                b.vertex_id(low + 2, ep.tgt as usize)
            ))
        })?;
    let mid = b.minus_edge(f_minus)?.tgt as usize;
    let f_plus = b.plus_into(low, mid, ep.label)?.ok_or_else(|| {
        LgbsError::NoSquare(format!(
            "no E+ edge labeled {} into {}",
            b.alphabet.name(ep.label),
            b.vertex_id(low + 1, mid)
        ))
    })?;
    if b.plus_edge(f_plus)?.src != em.tgt {
        return Err(LgbsError::NoSquare("completed square does not close on u".into()));
    }
    Ok((f_plus, f_minus))
}
