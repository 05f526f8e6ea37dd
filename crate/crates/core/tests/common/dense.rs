//! Dense-matrix reference built from Kronecker products and a generic
//! matrix exponential. Shares no code with the statevector kernels.

use falqon_core::graphs::Graph;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Mat = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli_x() -> Mat {
    Mat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_y() -> Mat {
    Mat::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)])
}

pub fn pauli_z() -> Mat {
    Mat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// `op` on qubit `q`, identity elsewhere. Qubit 0 is the least significant
/// bit of the basis index, so it is the rightmost Kronecker factor.
pub fn on_qubit(n: usize, q: usize, op: &Mat) -> Mat {
    let mut full = Mat::identity(1, 1);
    for k in (0..n).rev() {
        let factor = if k == q { op.clone() } else { Mat::identity(2, 2) };
        full = full.kronecker(&factor);
    }
    full
}

pub fn problem(g: &Graph) -> Mat {
    let n = g.n();
    let dim = 1 << n;
    let z = pauli_z();
    let mut h = Mat::zeros(dim, dim);
    for e in g.edges() {
        let zz = on_qubit(n, e.i, &z) * on_qubit(n, e.j, &z);
        h += (Mat::identity(dim, dim) - zz) * c(-e.w / 2.0);
    }
    h
}

pub fn mixer(n: usize) -> Mat {
    let dim = 1 << n;
    let x = pauli_x();
    (0..n).fold(Mat::zeros(dim, dim), |acc, q| acc + on_qubit(n, q, &x))
}

/// `i [H_d, H_p]` by direct matrix products.
pub fn commutator(g: &Graph) -> Mat {
    let hp = problem(g);
    let hd = mixer(g.n());
    (&hd * &hp - &hp * &hd) * I
}

/// `exp(-i t H)`.
pub fn propagator(h: &Mat, t: f64) -> Mat {
    (h * Complex64::new(0.0, -t)).exp()
}

/// `|->^n`, the ground state of `sum_j X_j`.
pub fn minus_state(n: usize) -> Vector {
    let minus = Vector::from_vec(vec![c(1.0 / 2f64.sqrt()), c(-1.0 / 2f64.sqrt())]);
    let mut v = Vector::from_vec(vec![c(1.0)]);
    for _ in 0..n {
        v = minus.kronecker(&v);
    }
    v
}

pub fn expect(h: &Mat, v: &Vector) -> f64 {
    v.dotc(&(h * v)).re
}

pub fn to_vector(amps: &[Complex64]) -> Vector {
    Vector::from_column_slice(amps)
}

pub fn max_diff(a: &Vector, b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct DenseTrace {
    pub betas: Vec<f64>,
    pub a: Vec<f64>,
    pub energy: Vec<f64>,
    pub states: Vec<Vector>,
}

/// Independent feedback loop: every layer re-exponentiates the mixer for
/// the current coefficient. Index 0 is the initial state.
pub fn feedback(g: &Graph, dt: f64, layers: usize) -> DenseTrace {
    let hp = problem(g);
    let hd = mixer(g.n());
    let comm = commutator(g);
    let up = propagator(&hp, dt);
    let mut psi = minus_state(g.n());
    let mut out = DenseTrace {
        betas: vec![0.0],
        a: vec![expect(&comm, &psi)],
        energy: vec![expect(&hp, &psi)],
        states: vec![psi.clone()],
    };
    let mut beta = 0.0;
    for _ in 0..layers {
        psi = propagator(&hd, beta * dt) * (&up * psi);
        let a = expect(&comm, &psi);
        out.betas.push(beta);
        out.a.push(a);
        out.energy.push(expect(&hp, &psi));
        out.states.push(psi.clone());
        beta = -a;
    }
    out
}

/// States after each layer of the circuit with the given mixer
/// coefficients, index 0 being `|->^n`.
pub fn replay(g: &Graph, dt: f64, betas: &[f64]) -> Vec<Vector> {
    let up = propagator(&problem(g), dt);
    let hd = mixer(g.n());
    let mut psi = minus_state(g.n());
    let mut out = vec![psi.clone()];
    for &b in betas {
        psi = propagator(&hd, b * dt) * (&up * psi);
        out.push(psi.clone());
    }
    out
}

/// `prod_k exp(-i beta_k H_d) exp(-i gamma_k H_p) |psi0>`.
pub fn qaoa(g: &Graph, gammas: &[f64], betas: &[f64], psi0: &Vector) -> f64 {
    let hp = problem(g);
    let hd = mixer(g.n());
    let mut psi = psi0.clone();
    for (&gm, &bt) in gammas.iter().zip(betas) {
        psi = propagator(&hd, bt) * (propagator(&hp, gm) * psi);
    }
    expect(&hp, &psi)
}
