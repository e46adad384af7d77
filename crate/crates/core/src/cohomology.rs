//! Cohomology of `(C(V), δ)` on the arity-truncated complex and coboundary solving.
//!
//! `δ` never lowers arity, so dropping all components of arity above the cap
//! gives a quotient complex on which every computation here is exact.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bracket::{differential_with, BracketKind};
use crate::cochain::{Cochain, Family, Flavor, StructureMap};
use crate::error::{Error, Result};
use crate::graded::{GradedVectorSpace, Parity, Vector};
use crate::linalg::{is_zero_vec, kernel_basis, solve_linear, Echelon, Matrix, Solution};
use crate::scalar::Scalar;

/// A homogeneous piece of `C(V)`: cochains of one arity and internal parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Slot {
    pub parity: Parity,
    pub arity: usize,
}

impl Slot {
    pub fn new(parity: Parity, arity: usize) -> Self {
        Slot { parity, arity }
    }

    pub fn good_parity(self) -> Parity {
        self.parity + Parity::of(self.arity as i64 - 1)
    }

    /// The slot of good degree `good` at the given arity.
    pub fn of_degree(good: Parity, arity: usize) -> Self {
        Slot { parity: good + Parity::of(arity as i64 - 1), arity }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(parity {}, arity {})", self.parity, self.arity)
    }
}

/// Elementary cochains of a slot: one per (domain tuple, homogeneous output basis vector).
#[derive(Debug, Clone)]
struct Cell {
    slot: Slot,
    basis: Vec<(Vec<usize>, usize)>,
    index: HashMap<(Vec<usize>, usize), usize>,
}

impl Cell {
    fn new(space: &GradedVectorSpace, flavor: Flavor, slot: Slot) -> Self {
        let mut basis = Vec::new();
        for args in Cochain::domain_tuples(space, flavor, slot.arity) {
            let target = slot.parity + space.tuple_parity(&args);
            for b in 0..space.dim() {
                if space.parity(b) == target {
                    basis.push((args.clone(), b));
                }
            }
        }
        let index = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Cell { slot, basis, index }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// An ordered list of slots, giving coordinates on their direct sum.
#[derive(Debug, Clone)]
pub struct Layout {
    space: Arc<GradedVectorSpace>,
    flavor: Flavor,
    cells: Vec<Cell>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Layout {
    pub fn new(space: &Arc<GradedVectorSpace>, flavor: Flavor, slots: &[Slot]) -> Self {
        let mut cells = Vec::new();
        let mut offsets = Vec::new();
        let mut dim = 0;
        for &slot in slots {
            let cell = Cell::new(space, flavor, slot);
            offsets.push(dim);
            dim += cell.dim();
            cells.push(cell);
        }
        Layout { space: space.clone(), flavor, cells, offsets, dim }
    }

    /// All slots of good degree `good` with arity in `1..=cap`.
    pub fn of_degree(space: &Arc<GradedVectorSpace>, flavor: Flavor, good: Parity, cap: usize) -> Self {
        let slots: Vec<Slot> = (1..=cap).map(|k| Slot::of_degree(good, k)).collect();
        Layout::new(space, flavor, &slots)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.cells.iter().map(|c| c.slot).collect()
    }

    fn position(&self, slot: Slot) -> Option<usize> {
        self.cells.iter().position(|c| c.slot == slot)
    }

    /// Coordinates of a cochain; errors if it has support outside the layout.
    pub fn coords_of_cochain(&self, c: &Cochain, out: &mut [Scalar]) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let slot = Slot::new(c.parity(), c.arity());
        let pos = self.position(slot).ok_or_else(|| Error::Internal(format!("cochain in slot {slot} outside the layout")))?;
        let cell = &self.cells[pos];
        for (args, v) in c.entries() {
            for (b, coef) in v.iter() {
                let i = cell.index[&(args.clone(), b)];
                out[self.offsets[pos] + i] += coef;
            }
        }
        Ok(())
    }

    pub fn coords(&self, f: &Family) -> Result<Vec<Scalar>> {
        let mut out = vec![Scalar::zero(); self.dim];
        for c in f.components() {
            self.coords_of_cochain(c, &mut out)?;
        }
        Ok(out)
    }

    /// The family with the given coordinates; all slots must share one good degree.
    pub fn family(&self, coords: &[Scalar]) -> Result<Family> {
        let good = self.cells.first().map(|c| c.slot.good_parity()).unwrap_or(Parity::EVEN);
        let mut f = Family::zero(&self.space, self.flavor, good);
        for (pos, cell) in self.cells.iter().enumerate() {
            f.add_cochain(&self.cell_cochain(pos, &coords[self.offsets[pos]..self.offsets[pos] + cell.dim()])?, &Scalar::one())?;
        }
        Ok(f)
    }

    fn cell_cochain(&self, pos: usize, coords: &[Scalar]) -> Result<Cochain> {
        let cell = &self.cells[pos];
        let mut c = Cochain::zero(&self.space, self.flavor, cell.slot.arity, cell.slot.parity)?;
        let mut values: BTreeMap<&Vec<usize>, Vector> = BTreeMap::new();
        for (i, coef) in coords.iter().enumerate() {
            if !coef.is_zero() {
                let (args, b) = &cell.basis[i];
                values.entry(args).or_default().add_term(*b, coef);
            }
        }
        for (args, v) in values {
            c.add_entry(args, &v)?;
        }
        Ok(c)
    }

    fn elementary(&self, index: usize) -> Result<Cochain> {
        let pos = self.offsets.partition_point(|&o| o <= index) - 1;
        let cell = &self.cells[pos];
        let (args, b) = &cell.basis[index - self.offsets[pos]];
        Cochain::zero(&self.space, self.flavor, cell.slot.arity, cell.slot.parity)?.with_entry(args, Vector::basis(*b))
    }
}

/// A basis of `H` on a set of slots, with everything needed to read off classes.
#[derive(Debug, Clone)]
pub struct Homology {
    pub layout: Layout,
    /// Cocycle representatives, independent modulo coboundaries.
    pub representatives: Vec<Vec<Scalar>>,
    /// A basis of the coboundaries supported on the layout.
    pub coboundaries: Vec<Vec<Scalar>>,
    pub cocycle_dim: usize,
}

impl Homology {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of the cocycle `v` against the representatives.
    pub fn class_coordinates(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let cols: Vec<&Vec<Scalar>> = self.representatives.iter().chain(&self.coboundaries).collect();
        let mut m = Matrix::zero(self.layout.dim(), cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x.clone());
                }
            }
        }
        match solve_linear(&m, v)? {
            Solution::Solved(x) => Ok(x[..self.representatives.len()].to_vec()),
            Solution::Inconsistent(_) => Err(Error::NotCocycle("vector is not a cocycle on these slots".into())),
        }
    }

    pub fn representative_families(&self) -> Result<Vec<Family>> {
        self.representatives.iter().map(|r| self.layout.family(r)).collect()
    }
}

/// `(C(V), δ)` truncated at an arity cap, with `δ = Σ_k [d_k, ·]` or `Σ_k {d_k, ·}`.
pub struct Complex {
    d: StructureMap,
    kind: BracketKind,
    cap: usize,
    images: RefCell<HashMap<Slot, Vec<Family>>>,
}

/// Result of solving `δx = ψ`.
#[derive(Debug, Clone)]
pub enum CoboundarySolution {
    Solved(Family),
    /// `ψ` is not exact; its class against the representatives of [`Homology`].
    Obstructed { coordinates: Vec<Scalar>, homology: Box<Homology> },
}

impl Complex {
    pub fn new(d: &StructureMap, kind: BracketKind, cap: usize) -> Self {
        Complex { d: d.clone(), kind, cap, images: RefCell::new(HashMap::new()) }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn structure(&self) -> &StructureMap {
        &self.d
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        self.d.space()
    }

    pub fn flavor(&self) -> Flavor {
        self.d.flavor()
    }

    /// `δf`, keeping arities `≤ cap`.
    pub fn apply(&self, f: &Family) -> Result<Family> {
        differential_with(&self.d, f, self.cap, self.kind)
    }

    pub fn degree_layout(&self, good: Parity) -> Layout {
        Layout::of_degree(self.space(), self.flavor(), good, self.cap)
    }

    /// A slot is unreliable when `δ` out of it reaches arities beyond the cap.
    pub fn boundary_unreliable(&self, slot: Slot) -> bool {
        let reach = self.d.max_arity().saturating_sub(1).max(1);
        slot.arity + reach > self.cap
    }

    fn column_images(&self, layout: &Layout) -> Result<Vec<Family>> {
        let mut out = Vec::with_capacity(layout.dim());
        for (pos, cell) in layout.cells.iter().enumerate() {
            if !self.images.borrow().contains_key(&cell.slot) {
                let mut imgs = Vec::with_capacity(cell.dim());
                for i in 0..cell.dim() {
                    let e = layout.elementary(layout.offsets[pos] + i)?;
                    imgs.push(self.apply(&Family::from_cochain(e))?);
                }
                self.images.borrow_mut().insert(cell.slot, imgs);
            }
            out.extend(self.images.borrow()[&cell.slot].iter().cloned());
        }
        Ok(out)
    }

    /// Matrix of `δ` from `cols` into `rows`; images must lie in `rows`.
    pub fn matrix(&self, cols: &Layout, rows: &Layout) -> Result<Matrix> {
        let mut m = Matrix::zero(rows.dim(), cols.dim());
        for (j, img) in self.column_images(cols)?.iter().enumerate() {
            for (i, x) in rows.coords(img)?.into_iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x);
                }
            }
        }
        Ok(m)
    }

    /// Cohomology on a set of slots sharing one good degree `g`: cocycles of
    /// those slots modulo the coboundaries `δx` (x of degree `g-1`) supported there.
    pub fn homology(&self, slots: &[Slot]) -> Result<Homology> {
        let good = common_degree(slots)?;
        let mid = Layout::new(self.space(), self.flavor(), slots);
        let next = self.degree_layout(good + Parity::ODD);
        let z = kernel_basis(&self.matrix(&mid, &next)?);

        let prev = self.degree_layout(good + Parity::ODD);
        let full = self.degree_layout(good);
        let m = self.matrix(&prev, &full)?;
        let mid_rows: Vec<Option<usize>> = {
            let mut map = vec![None; full.dim()];
            for (pos, cell) in full.cells.iter().enumerate() {
                if let Some(mpos) = mid.position(cell.slot) {
                    for i in 0..cell.dim() {
                        map[full.offsets[pos] + i] = Some(mid.offsets[mpos] + i);
                    }
                }
            }
            map
        };
        let mut off = Matrix::zero(full.dim(), prev.dim());
        let mut on = Matrix::zero(mid.dim(), prev.dim());
        let mut has_off = false;
        for (&(r, c), x) in m.entries() {
            match mid_rows[r] {
                Some(mr) => on.set(mr, c, x.clone()),
                None => {
                    off.set(r, c, x.clone());
                    has_off = true;
                }
            }
        }
        let sources: Vec<Vec<Scalar>> = if has_off {
            kernel_basis(&off)
        } else {
            (0..prev.dim()).map(|j| unit(prev.dim(), j)).collect()
        };
        let mut boundaries = Echelon::new(mid.dim());
        let mut coboundaries = Vec::new();
        for x in &sources {
            let img = on.mul_vec(x)?;
            if !is_zero_vec(&img) && boundaries.insert(&img) {
                coboundaries.push(img);
            }
        }
        let mut span = boundaries.clone();
        let mut representatives = Vec::new();
        for v in &z {
            if span.insert(v) {
                representatives.push(v.clone());
            }
        }
        Ok(Homology { layout: mid, representatives, coboundaries, cocycle_dim: z.len() })
    }

    /// Whether `δψ = 0` in the truncated complex.
    pub fn is_closed(&self, psi: &Family) -> Result<bool> {
        Ok(self.apply(psi)?.is_zero())
    }

    /// Solves `δx = ψ` with `x` supported on `unknowns` (pivot-canonical choice).
    ///
    /// On failure the class of `ψ` is reported in the cohomology of `class_slots`.
    pub fn solve(&self, unknowns: &[Slot], psi: &Family, class_slots: &[Slot]) -> Result<CoboundarySolution> {
        if !self.is_closed(psi)? {
            return Err(Error::NotCocycle(format!("δψ ≠ 0 for ψ = {psi}")));
        }
        let good = psi.good_parity();
        let rows = self.degree_layout(good);
        let cols = Layout::new(self.space(), self.flavor(), unknowns);
        let rhs = rows.coords(&psi.truncated(self.cap))?;
        let unknown_degree = good + Parity::ODD;
        if unknowns.iter().any(|s| s.good_parity() != unknown_degree) {
            return Err(Error::Parity("unknown slots must have good degree one less than the right-hand side".into()));
        }
        match solve_linear(&self.matrix(&cols, &rows)?, &rhs)? {
            Solution::Solved(x) => {
                let mut f = cols.family(&x)?;
                if cols.dim() == 0 {
                    f = Family::zero(self.space(), self.flavor(), unknown_degree);
                }
                Ok(CoboundarySolution::Solved(f))
            }
            Solution::Inconsistent(_) => {
                let homology = self.homology(class_slots)?;
                let coordinates = homology.class_coordinates(&homology.layout.coords(psi)?)?;
                Ok(CoboundarySolution::Obstructed { coordinates, homology: Box::new(homology) })
            }
        }
    }

    /// Solves `δx = ψ` over the whole truncated complex.
    pub fn solve_total(&self, psi: &Family) -> Result<CoboundarySolution> {
        let good = psi.good_parity();
        let unknowns = self.degree_layout(good + Parity::ODD).slots();
        let classes = self.degree_layout(good).slots();
        self.solve(&unknowns, psi, &classes)
    }
}

fn unit(n: usize, j: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[j] = Scalar::one();
    v
}

fn common_degree(slots: &[Slot]) -> Result<Parity> {
    let first = slots.first().ok_or_else(|| Error::Dimension("no slots given".into()))?;
    let g = first.good_parity();
    if slots.iter().any(|s| s.good_parity() != g) {
        return Err(Error::Parity("slots of different good degree".into()));
    }
    Ok(g)
}

/// Cohomology of a single slot, as cochains.
#[derive(Debug, Clone, Serialize)]
pub struct CohomologyBasis {
    pub slot: Slot,
    pub arity_cap: usize,
    #[serde(skip)]
    pub representatives: Vec<Cochain>,
    #[serde(skip)]
    pub coboundaries: Vec<Cochain>,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub dim: usize,
    /// `δ` out of this slot is partly cut off by the cap.
    pub boundary_unreliable: bool,
}

fn as_cochain(f: &Family, slot: Slot) -> Cochain {
    f.component_or_zero(slot.arity)
}

/// Matrix of the modified `δ` from one slot into the next good degree.
pub fn delta_matrix(d: &StructureMap, slot: Slot, cap: usize) -> Result<Matrix> {
    if slot.arity == 0 || slot.arity > cap {
        return Err(Error::Arity(format!("slot arity {} outside 1..={cap}", slot.arity)));
    }
    let cx = Complex::new(d, BracketKind::Modified, cap);
    let cols = Layout::new(d.space(), d.flavor(), &[slot]);
    cx.matrix(&cols, &cx.degree_layout(slot.good_parity() + Parity::ODD))
}

pub fn cohomology(d: &StructureMap, slot: Slot, cap: usize) -> Result<CohomologyBasis> {
    if slot.arity == 0 || slot.arity > cap {
        return Err(Error::Arity(format!("slot arity {} outside 1..={cap}", slot.arity)));
    }
    let cx = Complex::new(d, BracketKind::Modified, cap);
    let h = cx.homology(&[slot])?;
    let to_cochains = |vs: &[Vec<Scalar>]| -> Result<Vec<Cochain>> { vs.iter().map(|v| Ok(as_cochain(&h.layout.family(v)?, slot))).collect() };
    Ok(CohomologyBasis {
        slot,
        arity_cap: cap,
        representatives: to_cochains(&h.representatives)?,
        coboundaries: to_cochains(&h.coboundaries)?,
        cocycle_dim: h.cocycle_dim,
        coboundary_dim: h.coboundaries.len(),
        dim: h.dim(),
        boundary_unreliable: cx.boundary_unreliable(slot),
    })
}

/// Solves `δφ = ψ` for a homogeneous cochain `ψ`, or reports its class.
pub fn solve_coboundary(d: &StructureMap, psi: &Cochain, cap: usize) -> Result<CoboundarySolution> {
    let cx = Complex::new(d, BracketKind::Modified, cap);
    cx.solve_total(&Family::from_cochain(psi.clone()))
}
