//! Two-dimensional configurations: triangles, rectangles, zigzag paths, the
//! extension algorithms, the shift, the ultrametric and the factor map.

pub mod grid;
pub mod rep;
pub mod zigzag;

pub use grid::{complete_square_in, complete_square_out, level_of, Grid, Pos};
pub use rep::{
    class_member, config_window, distance, equivalent_at, periodic_config, pi_range,
    rep_from_window, shift_by, shift_rep, unshift_rep, ConfigurationRep, DistanceResult, Dyadic,
    WindowEquivalence,
};
pub use zigzag::{extract_zigzag, fatten, steps_from, Tail, ZigzagPath, ZigzagStep};

use crate::alphabet::{Sym, Word};
use crate::bisystem::LambdaBiSystem;
use crate::error::{LgbsError, Result};

/// A filled triangle: corner vertex, word, and the grid of all cells
/// `p <= k < l <= q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub corner: Pos,
    pub word: Word,
    pub grid: Grid,
}

/// A clipped rectangle window: corner `(p, q)`, `height` rows below `p`,
/// `width` columns right of `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedRectangle {
    pub corner: Pos,
    pub height: usize,
    pub width: usize,
    pub grid: Grid,
}

impl WindowedRectangle {
    pub fn validate(&self, b: &LambdaBiSystem) -> Result<()> {
        let (p, q) = self.corner;
        for k in (p - self.height as i64)..=p {
            for l in q..=(q + self.width as i64) {
                if self.grid.vertex((k, l)).is_none() {
                    return Err(LgbsError::DepthExhausted(format!(
                        "rectangle window misses ({k}, {l})"
                    )));
                }
            }
        }
        self.grid.validate_labels(b)
    }
}

/// Which side of the corner the rectangle extension fills first; the result
/// must not depend on it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtendOrder {
    LeftFirst,
    RightFirst,
}

/// Fill the triangle below a corner vertex from its word: the right column
/// is the unique descending `E⁻` path spelling the word, each row the unique
/// ascending `E⁺` trace-back of the corresponding suffix, and every unit
/// square must close.
pub fn fill_triangle(
    b: &LambdaBiSystem,
    corner: Pos,
    vertex: usize,
    word: &[Sym],
) -> Result<Triangle> {
    let n = level_of(corner)?;
    if word.len() != n {
        return Err(LgbsError::WordNotInP(format!(
            "word length {} does not match corner level {n}",
            word.len()
        )));
    }
    if vertex >= b.m(n)? {
        return Err(LgbsError::InvalidBisystem("corner vertex out of range".into()));
    }
    let mut g = Grid::new();
    g.set_vertex(corner, vertex)?;
    fill_triangle_into(b, &mut g, corner, word)?;
    Ok(Triangle { corner, word: word.to_vec(), grid: g })
}

/// The triangle fill over an existing grid that already holds the corner
/// vertex.  Split out so the rectangle extension can reuse it.
fn fill_triangle_into(b: &LambdaBiSystem, g: &mut Grid, corner: Pos, word: &[Sym]) -> Result<()> {
    let (p, q) = corner;
    let vertex = g
        .vertex(corner)
        .ok_or_else(|| LgbsError::InvalidBisystem("corner vertex missing".into()))?;
    let mu = |l: i64| -> Sym { word[(l - (p + 1)) as usize] };

    // Row p: trace the E+ path into the corner backward; its existence is
    // exactly membership of the word in P(corner).
    let mut cur = vertex;
    for l in ((p + 1)..=(q - 1)).rev() {
        let low = level_of((p, l))?;
        let pe = b.plus_into(low, cur, mu(l))?.ok_or_else(|| {
            LgbsError::WordNotInP(format!(
                "{} is not in P({})",
                b.alphabet.format_word(word),
                b.vertex_id(level_of(corner).unwrap(), vertex)
            ))
        })?;
        g.set_eplus(b, (p, l), pe)?;
        cur = b.plus_edge(pe)?.src as usize;
    }

    // Right column: the descending E- path from the corner spelling the word
    // (FPCC turns P-membership into F-membership).
    let mut cur = vertex;
    for k in (p + 1)..=(q - 1) {
        let low = level_of((k, q))?;
        let me = b.minus_out(low, cur, mu(k))?.ok_or_else(|| {
            LgbsError::InconsistentBisystem(format!(
                "descending path for {} breaks at row {k}",
                b.alphabet.format_word(word)
            ))
        })?;
        g.set_eminus(b, (k, q), me)?;
        cur = b.minus_edge(me)?.tgt as usize;
    }

    // Interior rows: trace each suffix back from the right column.
    for k in (p + 1)..=(q - 1) {
        let mut cur = g.vertex((k, q)).expect("column vertex placed");
        for l in ((k + 1)..=(q - 1)).rev() {
            let low = level_of((k, l))?;
            let pe = b.plus_into(low, cur, mu(l))?.ok_or_else(|| {
                LgbsError::InconsistentBisystem(format!("row {k} trace-back breaks at column {l}"))
            })?;
            g.set_eplus(b, (k, l), pe)?;
            cur = b.plus_edge(pe)?.src as usize;
        }
    }

    // Interior E- edges; each must land on the already-placed vertex, which
    // is the square-commutation check.
    for k in (p + 1)..=(q - 1) {
        for l in (k + 1)..q {
            let low = level_of((k, l))?;
            let src = g.vertex((k - 1, l)).expect("row above placed");
            let me = b.minus_out(low, src, mu(k))?.ok_or_else(|| {
                LgbsError::InconsistentBisystem(format!("no E- edge into ({k}, {l})"))
            })?;
            g.set_eminus(b, (k, l), me)?;
        }
    }
    Ok(())
}

/// Fatten a zigzag into its rectangle window.
pub fn rectangle_from_zigzag(
    b: &LambdaBiSystem,
    path: &ZigzagPath,
    height: usize,
    width: usize,
) -> Result<WindowedRectangle> {
    let depth = height.max(width);
    if matches!(path.tail, Tail::Finite) && path.len() < depth {
        return Err(LgbsError::DepthExhausted(format!(
            "zigzag depth {} cannot fill a {height} x {width} window",
            path.len()
        )));
    }
    let fat = fatten(b, path, depth)?;
    let grid = fat.restrict_rectangle(path.anchor, height, width);
    let rect = WindowedRectangle { corner: path.anchor, height, width, grid };
    rect.validate(b)?;
    Ok(rect)
}

/// The unique-extension algorithm: grow a rectangle window by a triangle
/// word into the full triangle window `Δ_{(p-h, q+w)}`.
///
/// The corner word is traced along row `p` and down column `q`; outer square
/// completions fill everything left of the corner column by column, a
/// resolving trace-back starts each new column at and below `p`; inner square
/// completions fill everything below the corner row by row, a resolving step
/// starts each new row at and beyond `q`; the triangle fill closes the
/// interior.  Left and right passes commute, which callers check by running
/// both orders.
pub fn extend_grid(
    b: &LambdaBiSystem,
    rect: &Grid,
    corner: Pos,
    height: usize,
    width: usize,
    word: &[Sym],
    order: ExtendOrder,
) -> Result<Grid> {
    let n = level_of(corner)?;
    if word.len() != n {
        return Err(LgbsError::WordNotInP(format!(
            "word length {} does not match corner level {n}",
            word.len()
        )));
    }
    let mut g = rect.clone();
    if g.vertex(corner).is_none() {
        return Err(LgbsError::DepthExhausted("rectangle misses its corner".into()));
    }
    fill_triangle_into(b, &mut g, corner, word)?;
    match order {
        ExtendOrder::LeftFirst => {
            extend_left(b, &mut g, corner, height)?;
            extend_right(b, &mut g, corner, width)?;
        }
        ExtendOrder::RightFirst => {
            extend_right(b, &mut g, corner, width)?;
            extend_left(b, &mut g, corner, height)?;
        }
    }
    Ok(g)
}

/// Columns `q-1` down to `p-h+1`: outer completions against the column to
/// the right, with a left-resolving trace-back starting each column at `p`
/// and below.
fn extend_left(b: &LambdaBiSystem, g: &mut Grid, corner: Pos, height: usize) -> Result<()> {
    let (p, q) = corner;
    let h = height as i64;
    // Strip between the triangle and the rectangle rows.
    for lp in ((p + 1)..=(q - 1)).rev() {
        for k in ((p - h + 1)..=p).rev() {
            let fp = g
                .eplus((k, lp))
                .ok_or_else(|| LgbsError::InconsistentBisystem(format!("missing E+ at ({k},{lp})")))?;
            let fm = g.eminus((k, lp + 1)).ok_or_else(|| {
                LgbsError::InconsistentBisystem(format!("missing E- at ({k},{})", lp + 1))
            })?;
            let (em, ep) = complete_square_out(b, fp, fm)?;
            g.set_eminus(b, (k, lp), em)?;
            g.set_eplus(b, (k - 1, lp), ep)?;
        }
    }
    // Columns at and left of the corner row index.
    for l0 in ((p - h + 1)..=p).rev() {
        let label = g
            .row_label(b, l0)
            .ok_or_else(|| LgbsError::DepthExhausted(format!("row label x_{l0} unknown")))?;
        let tgt = g
            .vertex((l0 - 1, l0 + 1))
            .ok_or_else(|| LgbsError::InconsistentBisystem(format!("missing vertex ({},{})", l0 - 1, l0 + 1)))?;
        let pe = b
            .plus_into(0, tgt, label)?
            .ok_or_else(|| LgbsError::InconsistentBisystem(format!("no starter edge for column {l0}")))?;
        g.set_eplus(b, (l0 - 1, l0), pe)?;
        for k in ((p - h + 1)..=(l0 - 1)).rev() {
            let fp = g.eplus((k, l0)).expect("column top placed");
            let fm = g.eminus((k, l0 + 1)).ok_or_else(|| {
                LgbsError::InconsistentBisystem(format!("missing E- at ({k},{})", l0 + 1))
            })?;
            let (em, ep) = complete_square_out(b, fp, fm)?;
            g.set_eminus(b, (k, l0), em)?;
            g.set_eplus(b, (k - 1, l0), ep)?;
        }
    }
    Ok(())
}

/// Rows `p+1` up to `q+w-1`: inner completions against the row below, with a
/// right-resolving step starting each row at `q` and beyond.
fn extend_right(b: &LambdaBiSystem, g: &mut Grid, corner: Pos, width: usize) -> Result<()> {
    let (p, q) = corner;
    let w = width as i64;
    // Triangle rows extended to the right of column q.
    for k0 in (p + 1)..=(q - 1) {
        for l in q..=(q + w - 1) {
            let ep = g
                .eplus((k0 - 1, l))
                .ok_or_else(|| LgbsError::InconsistentBisystem(format!("missing E+ at ({},{l})", k0 - 1)))?;
            let em = g
                .eminus((k0, l))
                .ok_or_else(|| LgbsError::InconsistentBisystem(format!("missing E- at ({k0},{l})")))?;
            let (fp, fm) = complete_square_in(b, em, ep)?;
            g.set_eplus(b, (k0, l), fp)?;
            g.set_eminus(b, (k0, l + 1), fm)?;
        }
    }
    // Rows at and beyond the corner column index.
    for k0 in q..=(q + w - 1) {
        let label = g
            .col_label(b, k0)
            .ok_or_else(|| LgbsError::DepthExhausted(format!("column label x_{k0} unknown")))?;
        let src = g
            .vertex((k0 - 1, k0 + 1))
            .ok_or_else(|| LgbsError::InconsistentBisystem(format!("missing vertex ({},{})", k0 - 1, k0 + 1)))?;
        let me = b
            .minus_out(0, src, label)?
            .ok_or_else(|| LgbsError::InconsistentBisystem(format!("no starter edge for row {k0}")))?;
        g.set_eminus(b, (k0, k0 + 1), me)?;
        for l in (k0 + 1)..=(q + w - 1) {
            let ep = g
                .eplus((k0 - 1, l))
                .ok_or_else(|| LgbsError::InconsistentBisystem(format!("missing E+ at ({},{l})", k0 - 1)))?;
            let em = g.eminus((k0, l)).expect("row start placed");
            let (fp, fm) = complete_square_in(b, em, ep)?;
            g.set_eplus(b, (k0, l), fp)?;
            g.set_eminus(b, (k0, l + 1), fm)?;
        }
    }
    Ok(())
}

/// Spec-level wrapper: extend a windowed rectangle by a corner word and
/// return the symmetric triangle window `Δ_{(-n, n)}`.
pub fn extend_rectangle(
    b: &LambdaBiSystem,
    rect: &WindowedRectangle,
    word: &[Sym],
    n: i64,
    order: ExtendOrder,
) -> Result<Grid> {
    let (p, q) = rect.corner;
    if p - (rect.height as i64) > -n || q + (rect.width as i64) < n {
        return Err(LgbsError::DepthExhausted(format!(
            "rectangle extents do not reach the window {n}"
        )));
    }
    let full = extend_grid(b, &rect.grid, rect.corner, rect.height, rect.width, word, order)?;
    Ok(full.restrict_triangle(-n, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{build_canonical_stabilized, ClassLocator};
    use crate::subshift;
    use crate::subshift::SubshiftPresentation;

    fn setup(p: &SubshiftPresentation, levels: usize) -> (LambdaBiSystem, ClassLocator) {
        let b = build_canonical_stabilized(p, levels).unwrap();
        let loc = ClassLocator::new(p, &b).unwrap();
        (b, loc)
    }

    fn w(p: &SubshiftPresentation, s: &str) -> Word {
        p.alphabet.parse_word(s).unwrap()
    }

    #[test]
    fn fill_triangle_full_shift() {
        let p = subshift::full_shift(2);
        let (b, _) = setup(&p, 4);
        let mu = w(&p, "010");
        let t = fill_triangle(&b, (-2, 2), 0, &mu).unwrap();
        // All vertices are the unique class per level.
        for pos in t.grid.positions() {
            assert_eq!(t.grid.vertex(pos), Some(0));
        }
        assert!(t.grid.covers_triangle(-2, 2));
        t.grid.validate_labels(&b).unwrap();
    }

    #[test]
    fn fill_triangle_golden_mean() {
        let p = subshift::golden_mean();
        let (b, _) = setup(&p, 4);
        // Corner class {00} is v2_0 (lex least at level 2).
        let t = fill_triangle(&b, (-1, 1 + 1), 0, &w(&p, "00")).unwrap();
        // Level-1 cells: ∂-derivative classes.  Row -1 trace of "00" into
        // {00}: the E+ path runs {0} -0-> {00} hence vertex at (-1,1) is
        // v1_0 = {0}; the column vertex at (0,2) is ∂_0{00} = {0} = v1_0.
        assert_eq!(t.grid.vertex((-1, 1)), Some(0));
        assert_eq!(t.grid.vertex((0, 2)), Some(0));
        assert!(t.grid.covers_triangle(-1, 2));
    }

    #[test]
    fn fill_triangle_word_not_in_p() {
        let p = subshift::golden_mean();
        let (b, _) = setup(&p, 4);
        // {00} does not contain 11.
        let err = fill_triangle(&b, (-1, 2), 0, &w(&p, "11")).unwrap_err();
        assert!(matches!(err, LgbsError::WordNotInP(_)));
    }

    #[test]
    fn degenerate_triangle() {
        let p = subshift::full_shift(2);
        let (b, _) = setup(&p, 3);
        let t = fill_triangle(&b, (0, 1), 0, &[]).unwrap();
        assert_eq!(t.grid.positions().count(), 1);
    }

    #[test]
    fn square_completion_round_trip() {
        for p in [subshift::full_shift(2), subshift::golden_mean(), subshift::even_shift()] {
            let (b, _) = setup(&p, 5);
            for low in 0..3usize {
                for (pi, pe) in b.plus_edges(low).unwrap().iter().enumerate() {
                    for (mi, me) in b.minus_edges(low + 1).unwrap().iter().enumerate() {
                        if pe.tgt != me.tgt {
                            continue;
                        }
                        let fp = crate::bisystem::PlusRef { low, idx: pi };
                        let fm = crate::bisystem::MinusRef { low: low + 1, idx: mi };
                        let (em, ep) = complete_square_out(&b, fp, fm).unwrap();
                        let (fp2, fm2) = complete_square_in(&b, em, ep).unwrap();
                        assert_eq!((fp, fm), (fp2, fm2));
                    }
                }
            }
        }
    }

    #[test]
    fn periodic_rep_and_window() {
        let p = subshift::golden_mean();
        let (b, loc) = setup(&p, 6);
        let rep = periodic_config(&b, &loc, &w(&p, "01")).unwrap();
        assert!(rep.is_periodic());
        let g = config_window(&b, &rep, 4).unwrap();
        assert!(g.covers_triangle(-4, 4));
        g.validate_labels(&b).unwrap();
        // Labels alternate 0, 1.
        let word = pi_range(&b, &rep, -3, 3).unwrap();
        assert_eq!(p.alphabet.format_word(&word), "1010101");
    }

    #[test]
    fn fixed_point_all_zero() {
        let p = subshift::golden_mean();
        let (b, loc) = setup(&p, 6);
        let rep = periodic_config(&b, &loc, &w(&p, "0")).unwrap();
        let word = pi_range(&b, &rep, -4, 4).unwrap();
        assert!(word.iter().all(|&s| s == p.alphabet.lookup("0").unwrap()));
    }

    #[test]
    fn window_rep_round_trip() {
        let p = subshift::even_shift();
        let (b, loc) = setup(&p, 6);
        for blk in ["0", "1", "001", "0011"] {
            let rep = periodic_config(&b, &loc, &w(&p, blk)).unwrap();
            let g = config_window(&b, &rep, 5).unwrap();
            let back = rep_from_window(&b, &g, 4).unwrap();
            assert_eq!(back.head, rep.head);
            assert_eq!(back.zigzag.start, rep.zigzag.start);
            for j in 0..4 {
                assert_eq!(back.zigzag.steps[j], rep.zigzag.step_at(&b, j).unwrap());
            }
        }
    }

    #[test]
    fn zigzag_rectangle_round_trip() {
        let p = subshift::golden_mean();
        let (b, loc) = setup(&p, 6);
        let rep = periodic_config(&b, &loc, &w(&p, "010")).unwrap();
        // Re-anchor the zigzag at (-3, 3) via the window.
        let g = config_window(&b, &rep, 8).unwrap();
        let zig = extract_zigzag(&g, (-3, 3), 4).unwrap();
        let rect = rectangle_from_zigzag(&b, &zig, 3, 3).unwrap();
        let back = extract_zigzag(&rect.grid, (-3, 3), 3).unwrap();
        assert_eq!(back.start, zig.start);
        assert_eq!(&back.steps[..], &zig.steps[..3]);
        // The rectangle agrees with the window on its region.
        assert_eq!(rect.grid, g.restrict_rectangle((-3, 3), 3, 3));
    }

    #[test]
    fn extension_orders_agree_and_restrict() {
        let p = subshift::even_shift();
        let (b, loc) = setup(&p, 6);
        for blk in ["0", "1", "001"] {
            let rep = periodic_config(&b, &loc, &w(&p, blk)).unwrap();
            let g = config_window(&b, &rep, 7).unwrap();
            let corner = (-2, 2);
            let rect = WindowedRectangle {
                corner,
                height: 3,
                width: 3,
                grid: g.restrict_rectangle(corner, 3, 3),
            };
            rect.validate(&b).unwrap();
            let v = rect.grid.vertex(corner).unwrap();
            for word in b.predecessor_set(3, v).unwrap() {
                let left = extend_rectangle(&b, &rect, &word, 4, ExtendOrder::LeftFirst).unwrap();
                let right = extend_rectangle(&b, &rect, &word, 4, ExtendOrder::RightFirst).unwrap();
                assert_eq!(left, right);
                // Restriction reproduces the input rectangle (within the
                // requested output window).
                assert_eq!(left.restrict_rectangle(corner, 2, 2), g.restrict_rectangle(corner, 2, 2));
            }
        }
    }

    #[test]
    fn shift_intertwines_with_labels() {
        let p = subshift::golden_mean();
        let (b, loc) = setup(&p, 6);
        let rep = periodic_config(&b, &loc, &w(&p, "010")).unwrap();
        let shifted = shift_rep(&b, &rep).unwrap();
        let a = pi_range(&b, &rep, -2, 4).unwrap();
        let c = pi_range(&b, &shifted, -3, 3).unwrap();
        assert_eq!(a, c);
        let back = unshift_rep(&b, &shifted).unwrap();
        assert_eq!(pi_range(&b, &back, -3, 3).unwrap(), pi_range(&b, &rep, -3, 3).unwrap());
        assert_eq!(back.head, rep.head);
        assert_eq!(back.zigzag.start, rep.zigzag.start);
    }

    #[test]
    fn distance_basics() {
        let p = subshift::golden_mean();
        let (b, loc) = setup(&p, 6);
        let x = periodic_config(&b, &loc, &w(&p, "0")).unwrap();
        let y = periodic_config(&b, &loc, &w(&p, "01")).unwrap();
        assert_eq!(distance(&b, &x, &x).unwrap(), DistanceResult::Exact(Dyadic::Zero));
        let DistanceResult::Exact(d) = distance(&b, &x, &y).unwrap() else {
            panic!("expected exact distance")
        };
        assert_ne!(d, Dyadic::Zero);
        // Symmetry.
        assert_eq!(distance(&b, &x, &y).unwrap(), distance(&b, &y, &x).unwrap());
    }

    #[test]
    fn equivalence_and_class_members() {
        let p = subshift::golden_mean();
        let (b, loc) = setup(&p, 6);
        let x = periodic_config(&b, &loc, &w(&p, "01")).unwrap();
        assert_eq!(equivalent_at(&b, &x, &x, (-1, 1), 0).unwrap(), WindowEquivalence::Equal);

        let corner = (-2, 2);
        let g = config_window(&b, &x, 5).unwrap();
        let v = g.vertex(corner).unwrap();
        let words: Vec<Word> = b.predecessor_set(3, v).unwrap().into_iter().collect();
        assert!(words.len() >= 2);
        for mu in &words {
            let z = class_member(&b, &x, corner, mu).unwrap();
            assert_eq!(equivalent_at(&b, &x, &z, corner, 0).unwrap(), WindowEquivalence::Equal);
            let agree = pi_range(&b, &z, 2, 5).unwrap();
            assert_eq!(agree, pi_range(&b, &x, 2, 5).unwrap());
            // Triangle word of the member is mu.
            let zw = config_window(&b, &z, 3).unwrap();
            let got: Word = (-1..=1)
                .map(|i| b.plus_edge(zw.eplus((i - 1, i)).unwrap()).unwrap().label)
                .collect();
            assert_eq!(&got, mu);
        }
        // Members with different words are distinct below the corner.
        let z0 = class_member(&b, &x, corner, &words[0]).unwrap();
        let z1 = class_member(&b, &x, corner, &words[1]).unwrap();
        assert_eq!(equivalent_at(&b, &z0, &z1, corner, 0).unwrap(), WindowEquivalence::Equal);
        assert_eq!(equivalent_at(&b, &z0, &z1, (-1, 1), 0).unwrap(), WindowEquivalence::Distinct);
    }

    #[test]
    fn equivalence_monotone_under_window_shrink() {
        let p = subshift::even_shift();
        let (b, loc) = setup(&p, 6);
        let x = periodic_config(&b, &loc, &w(&p, "001")).unwrap();
        let z = class_member(&b, &x, (-2, 2), &pi_word(&b, &x, -1, 1)).unwrap();
        assert_eq!(equivalent_at(&b, &x, &z, (-2, 2), 0).unwrap(), WindowEquivalence::Equal);
        // Bigger windows (further down-right) stay equal.
        for corner in [(-3, 2), (-2, 3), (-4, 4)] {
            assert_eq!(equivalent_at(&b, &x, &z, corner, 0).unwrap(), WindowEquivalence::Equal);
        }
    }

    fn pi_word(b: &LambdaBiSystem, x: &ConfigurationRep, a: i64, c: i64) -> Word {
        pi_range(b, x, a, c).unwrap()
    }

    #[test]
    fn full_shift_window_labels() {
        // Head 0 against an all-1 zigzag: labels are ...,1,1,0,1,1,...
        let p = subshift::full_shift(2);
        let (b, loc) = setup(&p, 4);
        let one = p.alphabet.lookup("1").unwrap();
        let zero = p.alphabet.lookup("0").unwrap();
        let rep1 = periodic_config(&b, &loc, &[one]).unwrap();
        let rep = ConfigurationRep::new(&b, zero, rep1.zigzag.clone()).unwrap();
        let word = pi_range(&b, &rep, -3, 3).unwrap();
        let names: Vec<&str> = word.iter().map(|&s| p.alphabet.name(s)).collect();
        assert_eq!(names, vec!["1", "1", "1", "0", "1", "1", "1"]);
    }

    #[test]
    fn pi_outputs_admissible() {
        let p = subshift::golden_mean();
        let (b, loc) = setup(&p, 6);
        let g = p.essential_graph().unwrap();
        for blk in ["0", "01", "001", "010"] {
            let rep = periodic_config(&b, &loc, &w(&p, blk)).unwrap();
            let word = pi_range(&b, &rep, -5, 5).unwrap();
            assert!(g.word_admissible(&word));
        }
    }

    #[test]
    fn finite_rep_depth_exhausts() {
        let p = subshift::golden_mean();
        let (b, loc) = setup(&p, 6);
        let rep = periodic_config(&b, &loc, &w(&p, "01")).unwrap();
        let finite = ConfigurationRep::new(
            &b,
            rep.head,
            ZigzagPath {
                anchor: (-1, 1),
                start: rep.zigzag.start,
                steps: rep.zigzag.steps[..2].to_vec(),
                tail: Tail::Finite,
            },
        )
        .unwrap();
        assert!(config_window(&b, &finite, 3).is_ok());
        assert!(matches!(
            config_window(&b, &finite, 5),
            Err(LgbsError::DepthExhausted(_))
        ));
    }
}
