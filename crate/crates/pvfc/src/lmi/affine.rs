use crate::error::{Error, Result};
use crate::numerics::SymMatrix;
use nalgebra::DMatrix;

/// Symmetric matrix affine in scalar decision variables:
/// `F(z) = F0 + Σ z_k F_k`.
#[derive(Debug, Clone)]
pub struct AffineLmi {
    constant: DMatrix<f64>,
    coeffs: Vec<(usize, DMatrix<f64>)>,
}

impl AffineLmi {
    pub fn new(constant: SymMatrix, coeffs: Vec<(usize, SymMatrix)>) -> Result<Self> {
        let n = constant.dim();
        if coeffs.iter().any(|(_, c)| c.dim() != n) {
            return Err(Error::InvalidInput(
                "coefficient blocks differ in dimension".into(),
            ));
        }
        let mut lmi = AffineLmi {
            constant: constant.into_matrix(),
            coeffs: Vec::new(),
        };
        for (id, c) in coeffs {
            lmi.add_coeff(id, c.into_matrix());
        }
        Ok(lmi)
    }

    fn add_coeff(&mut self, id: usize, m: DMatrix<f64>) {
        match self.coeffs.iter_mut().find(|(k, _)| *k == id) {
            Some((_, c)) => *c += m,
            None => {
                self.coeffs.push((id, m));
                self.coeffs.sort_by_key(|(k, _)| *k);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.constant.nrows()
    }

    pub fn constant(&self) -> &DMatrix<f64> {
        &self.constant
    }

    pub fn coeffs(&self) -> &[(usize, DMatrix<f64>)] {
        &self.coeffs
    }

    /// Largest decision-variable id referenced, plus one.
    pub fn n_vars(&self) -> usize {
        self.coeffs.iter().map(|(k, _)| k + 1).max().unwrap_or(0)
    }

    pub fn assemble(&self, z: &[f64]) -> Result<DMatrix<f64>> {
        let mut m = self.constant.clone();
        for (id, c) in &self.coeffs {
            let v = z.get(*id).ok_or(Error::IncompleteAssignment(*id))?;
            m += c * *v;
        }
        Ok(m)
    }
}

/// λ_max of the assembled matrix; negative iff the strict LMI `F(z) ≺ 0` holds.
pub fn lmi_min_eig(lmi: &AffineLmi, z: &[f64]) -> Result<f64> {
    let m = lmi.assemble(z)?;
    Ok(m.symmetric_eigen().eigenvalues.max())
}

/// A matrix-valued decision variable laid out over scalar ids.
#[derive(Debug, Clone)]
pub struct MatVar {
    rows: usize,
    cols: usize,
    symmetric: bool,
    ids: Vec<usize>,
}

impl MatVar {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Value of the variable under assignment `z`.
    pub fn value(&self, z: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (k, &id) in self.ids.iter().enumerate() {
            m += self.basis(k) * z[id];
        }
        m
    }

    fn basis(&self, k: usize) -> DMatrix<f64> {
        let mut e = DMatrix::zeros(self.rows, self.cols);
        if self.symmetric {
            let (i, j) = sym_index(self.rows, k);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
        } else {
            e[(k / self.cols, k % self.cols)] = 1.0;
        }
        e
    }
}

fn sym_index(n: usize, k: usize) -> (usize, usize) {
    let mut k = k;
    for i in 0..n {
        if k < n - i {
            return (i, i + k);
        }
        k -= n - i;
    }
    unreachable!()
}

/// Allocates scalar decision variables.
#[derive(Debug, Default, Clone)]
pub struct VarSpace {
    next: usize,
}

impl VarSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.next
    }

    pub fn is_empty(&self) -> bool {
        self.next == 0
    }

    pub fn scalar(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }

    pub fn symmetric(&mut self, n: usize) -> MatVar {
        let count = n * (n + 1) / 2;
        let ids = (0..count).map(|_| self.scalar()).collect();
        MatVar {
            rows: n,
            cols: n,
            symmetric: true,
            ids,
        }
    }

    pub fn general(&mut self, rows: usize, cols: usize) -> MatVar {
        let ids = (0..rows * cols).map(|_| self.scalar()).collect();
        MatVar {
            rows,
            cols,
            symmetric: false,
            ids,
        }
    }

    /// Scalar id wrapped as a 1×1 matrix variable.
    pub fn as_matvar(id: usize) -> MatVar {
        MatVar {
            rows: 1,
            cols: 1,
            symmetric: false,
            ids: vec![id],
        }
    }
}

/// Assembles a block-structured LMI from terms `L·V·R` in decision matrices.
#[derive(Debug, Clone)]
pub struct LmiBuilder {
    offsets: Vec<usize>,
    sizes: Vec<usize>,
    lmi: AffineLmi,
}

impl LmiBuilder {
    pub fn new(block_sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(block_sizes.len());
        let mut acc = 0;
        for &s in block_sizes {
            offsets.push(acc);
            acc += s;
        }
        LmiBuilder {
            offsets,
            sizes: block_sizes.to_vec(),
            lmi: AffineLmi {
                constant: DMatrix::zeros(acc, acc),
                coeffs: Vec::new(),
            },
        }
    }

    fn place(&self, bi: usize, bj: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(
            (m.nrows(), m.ncols()),
            (self.sizes[bi], self.sizes[bj]),
            "block shape mismatch"
        );
        let n = self.lmi.dim();
        let mut full = DMatrix::zeros(n, n);
        full.view_mut((self.offsets[bi], self.offsets[bj]), (m.nrows(), m.ncols()))
            .copy_from(m);
        if bi != bj {
            full.view_mut((self.offsets[bj], self.offsets[bi]), (m.ncols(), m.nrows()))
                .copy_from(&m.transpose());
        }
        full
    }

    /// Adds a constant to block (bi, bj) (mirrored when off-diagonal).
    pub fn constant(&mut self, bi: usize, bj: usize, m: &DMatrix<f64>) -> &mut Self {
        let full = self.place(bi, bj, m);
        self.lmi.constant += full;
        self
    }

    /// Adds `L·V·R` (or `L·Vᵀ·R` when `transpose`) to block (bi, bj).
    pub fn term(
        &mut self,
        bi: usize,
        bj: usize,
        left: &DMatrix<f64>,
        var: &MatVar,
        transpose: bool,
        right: &DMatrix<f64>,
    ) -> &mut Self {
        for (k, &id) in var.ids.iter().enumerate() {
            let e = var.basis(k);
            let e = if transpose { e.transpose() } else { e };
            let block = left * e * right;
            let full = self.place(bi, bj, &block);
            self.lmi.add_coeff(id, full);
        }
        self
    }

    /// Adds `coef·z·I` to diagonal block `b` for scalar variable `id`.
    pub fn scaled_identity(&mut self, b: usize, id: usize, coef: f64) -> &mut Self {
        let n = self.sizes[b];
        let full = self.place(b, b, &(eye(n) * coef));
        self.lmi.add_coeff(id, full);
        self
    }

    /// Adds `He(L·V·R) = L·V·R + (L·V·R)ᵀ` to diagonal block `b`.
    pub fn he(
        &mut self,
        b: usize,
        left: &DMatrix<f64>,
        var: &MatVar,
        right: &DMatrix<f64>,
    ) -> &mut Self {
        for (k, &id) in var.ids.iter().enumerate() {
            let block = left * var.basis(k) * right;
            let block = &block + block.transpose();
            let full = self.place(b, b, &block);
            self.lmi.add_coeff(id, full);
        }
        self
    }

    pub fn build(&self) -> Result<AffineLmi> {
        let sym_ok = |m: &DMatrix<f64>| (m - m.transpose()).amax() <= 1e-12 * m.amax().max(1.0);
        if !sym_ok(&self.lmi.constant) {
            return Err(Error::InvalidInput("constant block not symmetric".into()));
        }
        if let Some((id, _)) = self.lmi.coeffs.iter().find(|(_, c)| !sym_ok(c)) {
            return Err(Error::InvalidInput(format!(
                "coefficient of variable {id} not symmetric"
            )));
        }
        Ok(self.lmi.clone())
    }
}

pub(crate) fn eye(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}
