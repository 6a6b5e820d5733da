use super::{CodeFamily, Geometry, StabilizerCode};
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// Edge indexing of the periodic `L × L` lattice.
///
/// Horizontal edge `h(r, c)` joins vertices `(r, c)` and `(r, c+1)`;
/// vertical edge `v(r, c)` joins `(r, c)` and `(r+1, c)`. Coordinates wrap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToricLattice {
    pub l: usize,
}

impl ToricLattice {
    pub fn new(l: usize) -> Self {
        Self { l }
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.l * self.l
    }

    fn wrap(&self, a: isize) -> usize {
        a.rem_euclid(self.l as isize) as usize
    }

    pub fn h(&self, r: isize, c: isize) -> usize {
        self.wrap(r) * self.l + self.wrap(c)
    }

    pub fn v(&self, r: isize, c: isize) -> usize {
        self.l * self.l + self.wrap(r) * self.l + self.wrap(c)
    }

    /// The four edges meeting at vertex `(r, c)`.
    pub fn star(&self, r: usize, c: usize) -> [usize; 4] {
        let (r, c) = (r as isize, c as isize);
        [self.h(r, c), self.h(r, c - 1), self.v(r, c), self.v(r - 1, c)]
    }

    /// The boundary of the plaquette with top-left vertex `(r, c)`, in
    /// cyclic order.
    pub fn plaquette(&self, r: usize, c: usize) -> [usize; 4] {
        let (r, c) = (r as isize, c as isize);
        [self.h(r, c), self.v(r, c + 1), self.h(r + 1, c), self.v(r, c)]
    }

    pub fn plaquettes(&self) -> Vec<[usize; 4]> {
        (0..self.l)
            .flat_map(|r| (0..self.l).map(move |c| (r, c)))
            .map(|(r, c)| self.plaquette(r, c))
            .collect()
    }

    /// Qubits of the vertical band of columns `col..col+width` (wrapping):
    /// every horizontal and vertical edge whose column index lies in it.
    /// Bands run parallel to the logical strings.
    pub fn ring(&self, col: usize, width: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * width * self.l);
        for dc in 0..width {
            let c = (col + dc) as isize;
            for r in 0..self.l as isize {
                out.push(self.h(r, c));
                out.push(self.v(r, c));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Indices (into the toric check list) of the vertex and plaquette
    /// checks of columns `col..col+width`.
    pub fn check_ring(&self, col: usize, width: usize) -> Vec<usize> {
        let l = self.l;
        let mut out = Vec::with_capacity(2 * width * l);
        for dc in 0..width {
            let c = (col + dc) % l;
            for r in 0..l {
                out.push(r * l + c);
                out.push(l * l + r * l + c);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Image of qubit `q` under translation by `(dr, dc)`.
    pub fn translate(&self, q: usize, dr: isize, dc: isize) -> usize {
        let l2 = self.l * self.l;
        let (vertical, idx) = if q >= l2 { (true, q - l2) } else { (false, q) };
        let r = (idx / self.l) as isize + dr;
        let c = (idx % self.l) as isize + dc;
        if vertical {
            self.v(r, c)
        } else {
            self.h(r, c)
        }
    }
}

/// Toric code on an `L × L` lattice.
///
/// Checks are the `L²` vertex operators `A_v` followed by the `L²`
/// plaquette operators `B_p`, both in row-major order; two of them are
/// dependent. `Z̄_1` is a vertical string of `Z` on column-0 vertical edges
/// and `Z̄_2` a vertical string of `X` on column-0 horizontal edges.
pub fn build_toric(l: usize) -> Result<StabilizerCode> {
    if l < 2 {
        return Err(Error::InvalidArgument(format!("toric lattice size {l} < 2")));
    }
    let lat = ToricLattice::new(l);
    let n = lat.num_qubits();
    let mut checks = Vec::with_capacity(n);
    for r in 0..l {
        for c in 0..l {
            checks.push(PauliOperator::x_on(n, &lat.star(r, c)));
        }
    }
    for r in 0..l {
        for c in 0..l {
            checks.push(PauliOperator::z_on(n, &lat.plaquette(r, c)));
        }
    }
    let li = l as isize;
    let col = |f: &dyn Fn(isize) -> usize| (0..li).map(f).collect::<Vec<_>>();
    let z1 = PauliOperator::z_on(n, &col(&|r| lat.v(r, 0)));
    let x1 = PauliOperator::x_on(n, &col(&|c| lat.v(0, c)));
    let z2 = PauliOperator::x_on(n, &col(&|r| lat.h(r, 0)));
    let x2 = PauliOperator::z_on(n, &col(&|c| lat.h(0, c)));
    StabilizerCode::new(
        CodeFamily::Toric,
        n,
        checks,
        vec![z1, z2],
        vec![x1, x2],
        Geometry::Toric { l },
    )
}
