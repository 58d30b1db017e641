//! Independent reference implementations: dense Kronecker all-at-once
//! solves, sequential DIRK and textbook scalar Krylov iterations.

use blockstep::dirk::{ButcherTableau, LinearProblem};
use blockstep::sparse::{CsrMatrix, SmallDense};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{dense, dense_matvec, dot, norm};

pub fn to_dmatrix(a: &CsrMatrix) -> DMatrix<f64> {
    let d = dense(a);
    DMatrix::from_fn(a.n_rows(), a.n_cols(), |i, j| d[i][j])
}

pub fn random_spd_dense(rng: &mut rand_chacha::ChaCha8Rng, n: usize, shift: f64) -> CsrMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let s = &g * g.transpose() + DMatrix::identity(n, n) * shift;
    let v: Vec<f64> = (0..n * n).map(|p| s[(p / n, p % n)]).collect();
    CsrMatrix::from_dense(n, n, &v).unwrap()
}

/// Random consistent stiffly accurate DIRK with constant diagonal, optionally
/// with an explicit first stage; `mp` implicit stages.
pub fn random_tableau(rng: &mut rand_chacha::ChaCha8Rng, mp: usize, explicit: bool) -> ButcherTableau {
    let gamma = rng.gen_range(0.25..1.0);
    let o = usize::from(explicit);
    let m = mp + o;
    let mut a = vec![vec![0.0; m]; m];
    for i in o..m {
        for j in 0..i {
            a[i][j] = rng.gen_range(-0.5..0.5);
        }
        a[i][i] = gamma;
    }
    if m == 1 {
        a[0][0] = 1.0;
    } else {
        let rest: f64 = a[m - 1][1..].iter().sum();
        a[m - 1][0] = 1.0 - rest;
    }
    let c: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let b = a[m - 1].clone();
    ButcherTableau::new(a, b, c).unwrap()
}

/// Sequential DIRK for `M y' + K y = b(t)`, dense direct solves per stage.
pub fn sequential_dirk(
    m: &DMatrix<f64>,
    k: &DMatrix<f64>,
    b: &dyn Fn(f64) -> DVector<f64>,
    tab: &ButcherTableau,
    tau: f64,
    y0: &DVector<f64>,
    steps: usize,
) -> Vec<Vec<DVector<f64>>> {
    let s = tab.stages();
    let a = tab.a();
    let c = tab.c();
    let mut y = y0.clone();
    let mut out = Vec::new();
    for n in 0..steps {
        let tn = n as f64 * tau;
        let mut stages: Vec<DVector<f64>> = Vec::new();
        for i in 0..s {
            if i == 0 && tab.explicit_first_stage() {
                stages.push(y.clone());
                continue;
            }
            let mut rhs = m * &y / tau;
            for j in 0..i {
                rhs -= (k * &stages[j] - b(tn + c[j] * tau)) * a.get(i, j);
            }
            rhs += b(tn + c[i] * tau) * a.get(i, i);
            let lhs = m / tau + k * a.get(i, i);
            stages.push(lhs.lu().solve(&rhs).unwrap());
        }
        y = stages[s - 1].clone();
        out.push(stages);
    }
    out
}

/// Dense all-at-once solve of `[A1⊗M + A2⊗K] vec Y = [A2⊗I] vec B + vec B0`.
pub fn kronecker_solve(
    m: &DMatrix<f64>,
    k: &DMatrix<f64>,
    a1: &SmallDense,
    a2: &SmallDense,
    b: &[DVector<f64>],
    b0: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let n = m.nrows();
    let w = a1.rows();
    let mut big = DMatrix::zeros(n * w, n * w);
    let mut rhs = DVector::zeros(n * w);
    for p in 0..w {
        for q in 0..w {
            let blk = m * a1.get(p, q) + k * a2.get(p, q);
            big.view_mut((p * n, q * n), (n, n)).copy_from(&blk);
            let add = &b[q] * a2.get(p, q);
            let mut seg = rhs.rows_mut(p * n, n);
            seg += add;
        }
        let mut seg = rhs.rows_mut(p * n, n);
        seg += &b0[p];
    }
    let x = big.lu().solve(&rhs).unwrap();
    (0..w).map(|p| x.rows(p * n, n).into_owned()).collect()
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// Window matrices written out from the block structure: step blocks of
/// `I/τ` and `A_impl`, `−1/τ` and `a_{i,1}` couplings to the previous step's last stage.
pub fn oracle_window(tab: &ButcherTableau, tau: f64, s: usize) -> (SmallDense, SmallDense) {
    let full = tab.a();
    let o = usize::from(tab.explicit_first_stage());
    let mp = tab.stages() - o;
    let w = s * mp;
    let mut a1 = SmallDense::zeros(w, w);
    let mut a2 = SmallDense::zeros(w, w);
    for blk in 0..s {
        for i in 0..mp {
            let p = blk * mp + i;
            a1.set(p, p, 1.0 / tau);
            for j in 0..=i {
                a2.set(p, blk * mp + j, full.get(i + o, j + o));
            }
            if blk > 0 {
                let q = blk * mp - 1;
                a1.set(p, q, -1.0 / tau);
                if o == 1 {
                    a2.set(p, q, full.get(i + 1, 0));
                }
            }
        }
    }
    (a1, a2)
}

pub struct Instance {
    pub m: CsrMatrix,
    pub k: CsrMatrix,
    pub b0v: Vec<f64>,
    pub b1v: Vec<f64>,
    pub y0: Vec<f64>,
}

impl Instance {
    pub fn random(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Self {
        Self {
            m: random_spd_dense(rng, n, 1.0),
            k: random_spd_dense(rng, n, 0.1),
            b0v: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            b1v: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            y0: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    pub fn b(&self, t: f64) -> Vec<f64> {
        self.b0v.iter().zip(&self.b1v).map(|(p, q)| p + t * q).collect()
    }

    pub fn problem(&self) -> LinearProblem<impl Fn(f64, &mut [f64]) + '_> {
        LinearProblem {
            mass: self.m.clone(),
            stiffness: self.k.clone(),
            rhs: move |t: f64, out: &mut [f64]| out.copy_from_slice(&self.b(t)),
            initial: self.y0.clone(),
        }
    }
}

/// Textbook Jacobi-preconditioned CG on dense storage; returns all iterates.
pub fn scalar_pcg(a: &[Vec<f64>], b: &[f64], iters: usize) -> Vec<Vec<f64>> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = (0..n).map(|i| r[i] / a[i][i]).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut out = Vec::new();
    for _ in 0..iters {
        let ap = dense_matvec(a, &p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        out.push(x.clone());
        z = (0..n).map(|i| r[i] / a[i][i]).collect();
        let rz_new = dot(&r, &z);
        for i in 0..n {
            p[i] = z[i] + rz_new / rz * p[i];
        }
        rz = rz_new;
    }
    out
}

/// Textbook right-preconditioned BiCGStab (identity preconditioner) on dense storage.
pub fn scalar_bicgstab(a: &[Vec<f64>], b: &[f64], reduction: f64, max_iters: usize) -> (Vec<f64>, usize) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = r.clone();
    let target = reduction * norm(b);
    let mut p = r.clone();
    let mut rho = dot(&r0, &r);
    for it in 1..=max_iters {
        let v = dense_matvec(a, &p);
        let alpha = rho / dot(&r0, &v);
        let s: Vec<f64> = (0..n).map(|i| r[i] - alpha * v[i]).collect();
        if norm(&s) <= target {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            return (x, it);
        }
        let t = dense_matvec(a, &s);
        let omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        if norm(&r) <= target {
            return (x, it);
        }
        let rho_new = dot(&r0, &r);
        let beta = rho_new / rho * alpha / omega;
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
    }
    (x, max_iters)
}

/// Textbook BiCGStab without preconditioning; returns the iterate after
/// each full iteration.
pub fn scalar_bicgstab_iterates(a: &[Vec<f64>], b: &[f64], iters: usize) -> Vec<Vec<f64>> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = r.clone();
    let mut p = r.clone();
    let mut rho = dot(&r0, &r);
    let mut out = Vec::new();
    for _ in 0..iters {
        let v = dense_matvec(a, &p);
        let alpha = rho / dot(&r0, &v);
        let s: Vec<f64> = (0..n).map(|i| r[i] - alpha * v[i]).collect();
        let t = dense_matvec(a, &s);
        let omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        out.push(x.clone());
        let rho_new = dot(&r0, &r);
        let beta = rho_new / rho * alpha / omega;
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
    }
    out
}
