//! Linear DAEs `E ∂x = A x + B u` and their approximation by affine ODEs.
//!
//! The approximating ODE right-hand side is the backward-Euler slope
//! `F_h(x) = (E − hA)⁻¹(A x + b)`. For time-varying inputs generated by an
//! [`InputModel`], [`compose_input`] builds the extended system over
//! `(x, u⁽⁰⁾, z⁽⁰⁾, u⁽¹⁾, z⁽¹⁾)` whose circuit block depends only on
//! `(E, A, B, h)` and whose input block depends only on `(D, d, h)`.

mod input;
mod reference;

pub use input::{fourier_input, square_wave_terms, FourierTerm, InputModel};
pub use reference::{reference_solve, ReferenceRun, ReferenceSolver};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::numerics::{norm_inf, Lu, Matrix};

/// Default approximation parameter `h`.
pub const DEFAULT_H: f64 = 0.01;
/// Default seed for regularity probe steps.
pub const DEFAULT_PROBE_SEED: u64 = 0x00c1_2c2c;
/// Relative determinant magnitude below which a probe counts as singular.
const DET_RTOL: f64 = 1e-10;

/// `E ∂x = A x + B u` over named states and inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DaeSystem {
    e: Matrix,
    a: Matrix,
    b: Matrix,
    state_names: Vec<String>,
    input_names: Vec<String>,
    output_index: usize,
}

impl DaeSystem {
    pub fn new(
        e: Matrix,
        a: Matrix,
        b: Matrix,
        state_names: Vec<String>,
        input_names: Vec<String>,
        output_index: usize,
    ) -> Result<Self> {
        let n = state_names.len();
        if e.rows() != n || e.cols() != n || a.rows() != n || a.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "E is {}x{}, A is {}x{}, {} states",
                e.rows(),
                e.cols(),
                a.rows(),
                a.cols(),
                n
            )));
        }
        if b.rows() != n || b.cols() != input_names.len() {
            return Err(Error::DimensionMismatch(format!(
                "B is {}x{}, expected {n}x{}",
                b.rows(),
                b.cols(),
                input_names.len()
            )));
        }
        if output_index >= n {
            return Err(Error::DimensionMismatch(format!(
                "output index {output_index} out of range for {n} states"
            )));
        }
        if !(e.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::Validation("non-finite DAE coefficient".into()));
        }
        Ok(DaeSystem {
            e,
            a,
            b,
            state_names,
            input_names,
            output_index,
        })
    }

    /// System without inputs (`B` has zero columns).
    pub fn autonomous(e: Matrix, a: Matrix, state_names: Vec<String>) -> Result<Self> {
        let n = state_names.len();
        DaeSystem::new(e, a, Matrix::zeros(n, 0), state_names, Vec::new(), 0)
    }

    pub fn n(&self) -> usize {
        self.state_names.len()
    }

    pub fn m(&self) -> usize {
        self.input_names.len()
    }

    pub fn e(&self) -> &Matrix {
        &self.e
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn output_index(&self) -> usize {
        self.output_index
    }

    pub fn output_name(&self) -> &str {
        &self.state_names[self.output_index]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|s| s == name)
    }

    /// Constant forcing `b = B·u`.
    pub fn forcing(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.b.mul_vec(u)
    }

    /// `E − hA`.
    pub fn shifted_pencil(&self, h: f64) -> Matrix {
        self.e
            .add_scaled(&self.a, -h)
            .expect("E and A share a shape")
    }

    /// Rows of `E` that vanish identically (purely algebraic equations).
    pub fn algebraic_rows(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.e.row(i).iter().all(|&v| v == 0.0))
            .collect()
    }

    /// Largest violation `|(A x + B u)_r|` over algebraic rows `r`.
    pub fn algebraic_residual(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        let ax = self.a.mul_vec(x)?;
        let bu = self.b.mul_vec(u)?;
        Ok(self
            .algebraic_rows()
            .into_iter()
            .map(|r| (ax[r] + bu[r]).abs())
            .fold(0.0, f64::max))
    }

    /// Whether `E` itself is invertible, i.e. the DAE is an implicit ODE.
    pub fn has_invertible_e(&self) -> bool {
        self.n() > 0 && Lu::factor(&self.e).is_ok()
    }
}

/// Pseudo-random probe steps in `(1e-4, 0.5)`, reproducible from `seed`.
pub fn probe_steps(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..8).map(|_| rng.gen_range(1e-4..0.5)).collect()
}

/// `true` iff `det(E − hA)` is numerically nonzero for at least one probe `h`.
///
/// The determinant is compared against the Hadamard bound (product of row
/// 2-norms), so the test is invariant to row scaling.
pub fn check_regularity(sys: &DaeSystem, h_probe: &[f64]) -> bool {
    if sys.n() == 0 {
        return true;
    }
    h_probe.iter().any(|&h| {
        let m = sys.shifted_pencil(h);
        let scale: f64 = (0..m.rows())
            .map(|i| m.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .product();
        if scale == 0.0 || !scale.is_finite() {
            return false;
        }
        let det = crate::numerics::determinant(&m).unwrap_or(0.0);
        det.abs() > DET_RTOL * scale
    })
}

/// One tiny implicit step `x0 + h·F_h(x0)` that carries `x0` onto the
/// consistent set up to `O(h)`. The flag is set when the step moved `x0`
/// by more than `10·h·(1 + ‖x0‖∞)`.
pub fn consistent_project(
    sys: &DaeSystem,
    b: &[f64],
    x0: &[f64],
    h_tiny: f64,
) -> Result<(Vec<f64>, bool)> {
    if !(h_tiny > 0.0 && h_tiny <= 1e-4) {
        return Err(Error::Config(format!(
            "projection step must lie in (0, 1e-4], got {h_tiny}"
        )));
    }
    let map = backward_euler_map(sys, b, h_tiny)?;
    let slope = map.eval_vec(x0);
    let projected: Vec<f64> = x0.iter().zip(&slope).map(|(x, f)| x + h_tiny * f).collect();
    let shift = x0
        .iter()
        .zip(&projected)
        .fold(0.0, |m, (a, p)| f64::max(m, (a - p).abs()));
    let flagged = shift > 10.0 * h_tiny * (1.0 + norm_inf(x0));
    Ok((projected, flagged))
}

/// `∂x = Â x + b̂` over named states.
///
/// The first `driven` states carry dynamics; any remaining states are
/// exogenous signals (catalysts) whose rows are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineOde {
    ahat: Matrix,
    bhat: Vec<f64>,
    state_names: Vec<String>,
    driven: usize,
    output_index: Option<usize>,
}

impl AffineOde {
    pub fn new(ahat: Matrix, bhat: Vec<f64>, state_names: Vec<String>) -> Result<Self> {
        let n = state_names.len();
        AffineOde::with_exogenous(ahat, bhat, state_names, n)
    }

    pub fn with_exogenous(
        ahat: Matrix,
        bhat: Vec<f64>,
        state_names: Vec<String>,
        driven: usize,
    ) -> Result<Self> {
        let n = state_names.len();
        if ahat.rows() != n || ahat.cols() != n || bhat.len() != n || driven > n {
            return Err(Error::DimensionMismatch(format!(
                "Â is {}x{}, b̂ has {}, {} states ({} driven)",
                ahat.rows(),
                ahat.cols(),
                bhat.len(),
                n,
                driven
            )));
        }
        if !ahat.is_finite() || bhat.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite ODE coefficient".into()));
        }
        if (driven..n).any(|i| bhat[i] != 0.0 || ahat.row(i).iter().any(|&v| v != 0.0)) {
            return Err(Error::Validation(
                "exogenous states must have zero dynamics".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = state_names.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(Error::Validation(format!("duplicate state name {dup}")));
        }
        Ok(AffineOde {
            ahat,
            bhat,
            state_names,
            driven,
            output_index: None,
        })
    }

    pub fn with_output(mut self, index: usize) -> Self {
        assert!(index < self.state_names.len());
        self.output_index = Some(index);
        self
    }

    pub fn ahat(&self) -> &Matrix {
        &self.ahat
    }

    pub fn bhat(&self) -> &[f64] {
        &self.bhat
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn driven(&self) -> usize {
        self.driven
    }

    pub fn output_index(&self) -> Option<usize> {
        self.output_index
    }

    pub fn len(&self) -> usize {
        self.state_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state_names.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|s| s == name)
    }

    /// Joins a circuit block (whose exogenous states are inputs) with the
    /// system driving those inputs, into one fully driven ODE over the
    /// circuit's driven states followed by all of `driver`'s states.
    pub fn stack(circuit: &AffineOde, driver: &AffineOde) -> Result<AffineOde> {
        let mut names: Vec<String> = circuit.state_names[..circuit.driven].to_vec();
        names.extend(driver.state_names.iter().cloned());
        let n = names.len();
        let index = |name: &str| names.iter().position(|s| s == name);
        let mut ahat = Matrix::zeros(n, n);
        let mut bhat = vec![0.0; n];
        for i in 0..circuit.driven {
            bhat[i] = circuit.bhat[i];
            for (j, name) in circuit.state_names.iter().enumerate() {
                let v = circuit.ahat[(i, j)];
                if v == 0.0 {
                    continue;
                }
                let gj = index(name).ok_or_else(|| {
                    Error::Validation(format!("circuit input {name} is not driven"))
                })?;
                ahat[(i, gj)] = v;
            }
        }
        let off = circuit.driven;
        ahat.set_block(off, off, &driver.ahat);
        bhat[off..].copy_from_slice(&driver.bhat);
        let mut out = AffineOde::new(ahat, bhat, names)?;
        out.output_index = circuit.output_index;
        Ok(out)
    }
}

impl VectorField for AffineOde {
    fn names(&self) -> &[String] {
        &self.state_names
    }

    fn eval(&self, state: &[f64], deriv: &mut [f64]) {
        let n = self.state_names.len();
        for i in 0..n {
            let row = self.ahat.row(i);
            deriv[i] = self.bhat[i] + row.iter().zip(state).map(|(a, x)| a * x).sum::<f64>();
        }
    }
}

/// `Âₕ = (E − hA)⁻¹A`, `b̂ₕ = (E − hA)⁻¹b`.
pub fn backward_euler_map(sys: &DaeSystem, b: &[f64], h: f64) -> Result<AffineOde> {
    if !(h > 0.0) {
        return Err(Error::Config(format!("h must be positive, got {h}")));
    }
    if b.len() != sys.n() {
        return Err(Error::DimensionMismatch(format!(
            "forcing of length {} for {} states",
            b.len(),
            sys.n()
        )));
    }
    let lu = Lu::factor(&sys.shifted_pencil(h))?;
    let ahat = lu.solve_matrix(sys.a());
    let bhat = lu.solve(b);
    Ok(AffineOde::new(ahat, bhat, sys.state_names.clone())?.with_output(sys.output_index))
}

/// Backward-Euler map with constant inputs kept as exogenous catalyst
/// states: `∂x = (E − hA)⁻¹(A x + B u)`, `∂u = 0`, over `(x, u)`.
pub fn backward_euler_map_with_inputs(sys: &DaeSystem, h: f64) -> Result<AffineOde> {
    if !(h > 0.0) {
        return Err(Error::Config(format!("h must be positive, got {h}")));
    }
    let lu = Lu::factor(&sys.shifted_pencil(h))?;
    let (n, m) = (sys.n(), sys.m());
    let mut ahat = Matrix::zeros(n + m, n + m);
    ahat.set_block(0, 0, &lu.solve_matrix(sys.a()));
    ahat.set_block(0, n, &lu.solve_matrix(sys.b()));
    let names = sys
        .state_names
        .iter()
        .chain(&sys.input_names)
        .cloned()
        .collect();
    Ok(AffineOde::with_exogenous(ahat, vec![0.0; n + m], names, n)?.with_output(sys.output_index))
}

/// Name of the `u⁽¹⁾` companion of an input or auxiliary state.
pub fn companion_name(name: &str) -> String {
    format!("d_{name}")
}

/// Circuit and input blocks of an approximated DAE with generated inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedOde {
    /// Driven over `x`, with the inputs the circuit reads as exogenous states.
    pub circuit: AffineOde,
    /// Fully driven dynamics of the input rails.
    pub input: AffineOde,
    /// Initial values of `input`'s states, in its state order.
    pub input_init: Vec<f64>,
}

impl ComposedOde {
    /// Single ODE over `x` followed by the input states.
    pub fn full(&self) -> Result<AffineOde> {
        AffineOde::stack(&self.circuit, &self.input)
    }

    /// Initial state for [`ComposedOde::full`] given the circuit state `x0`.
    pub fn initial_state(&self, x0: &[f64]) -> Vec<f64> {
        x0.iter().chain(&self.input_init).copied().collect()
    }

    pub fn circuit_names(&self) -> &[String] {
        &self.circuit.state_names()[..self.circuit.driven()]
    }
}

/// Extended ODE for a DAE driven by generated inputs:
///
/// * `∂x = (E − hA)⁻¹(A x + B u⁽⁰⁾ + h B u⁽¹⁾)`
/// * `∂(u⁽⁰⁾, z⁽⁰⁾) = (I − hD)⁻¹D (u⁽⁰⁾, z⁽⁰⁾) + (I − hD)⁻¹d`
/// * `∂(u⁽¹⁾, z⁽¹⁾) = (I − hD)⁻¹D (u⁽¹⁾, z⁽¹⁾)`
///
/// with `(u⁽¹⁾, z⁽¹⁾)(0) = (I − hD)⁻¹(D (u, z)(0) + d)`.
pub fn compose_input(sys: &DaeSystem, inp: &InputModel, h: f64) -> Result<ComposedOde> {
    check_input_names(sys, inp)?;
    if !(h > 0.0) {
        return Err(Error::Config(format!("h must be positive, got {h}")));
    }
    let (n, m, q) = (sys.n(), sys.m(), inp.dim());

    // Circuit block over (x, u⁽⁰⁾, u⁽¹⁾).
    let lu = Lu::factor(&sys.shifted_pencil(h))?;
    let gain = lu.solve_matrix(sys.b());
    let mut ahat = Matrix::zeros(n + 2 * m, n + 2 * m);
    ahat.set_block(0, 0, &lu.solve_matrix(sys.a()));
    ahat.set_block(0, n, &gain);
    ahat.set_block(0, n + m, &gain.scaled(h));
    let companions: Vec<String> = inp
        .input_names()
        .iter()
        .map(|s| companion_name(s))
        .collect();
    let names: Vec<String> = sys
        .state_names
        .iter()
        .chain(inp.input_names())
        .chain(&companions)
        .cloned()
        .collect();
    let circuit = AffineOde::with_exogenous(ahat, vec![0.0; n + 2 * m], names, n)?
        .with_output(sys.output_index);

    // Input block over (u⁽⁰⁾, z⁽⁰⁾, u⁽¹⁾, z⁽¹⁾).
    let shifted = Matrix::identity(q).add_scaled(inp.d(), -h)?;
    let input_lu = Lu::factor(&shifted)?;
    let md = input_lu.solve_matrix(inp.d());
    let md_offset = input_lu.solve(inp.offset());
    let mut input_a = Matrix::zeros(2 * q, 2 * q);
    input_a.set_block(0, 0, &md);
    input_a.set_block(q, q, &md);
    let mut input_b = vec![0.0; 2 * q];
    input_b[..q].copy_from_slice(&md_offset);

    let base = inp.state_names();
    let input_names: Vec<String> = base
        .iter()
        .cloned()
        .chain(base.iter().map(|s| companion_name(s)))
        .collect();
    let input = AffineOde::new(input_a, input_b, input_names)?;

    let init0 = inp.initial();
    let mut forced = inp.d().mul_vec(&init0)?;
    forced
        .iter_mut()
        .zip(inp.offset())
        .for_each(|(v, d)| *v += d);
    let init1 = input_lu.solve(&forced);
    let input_init = init0.into_iter().chain(init1).collect();

    Ok(ComposedOde {
        circuit,
        input,
        input_init,
    })
}

/// Exact ODE for a DAE with invertible `E`: `∂x = E⁻¹(A x + B u)` driven by
/// the input model's own dynamics; no `h` and no `u⁽¹⁾` rails.
pub fn compose_direct(sys: &DaeSystem, inp: &InputModel) -> Result<ComposedOde> {
    check_input_names(sys, inp)?;
    let (n, m) = (sys.n(), sys.m());
    let lu = Lu::factor(sys.e())?;
    let mut ahat = Matrix::zeros(n + m, n + m);
    ahat.set_block(0, 0, &lu.solve_matrix(sys.a()));
    ahat.set_block(0, n, &lu.solve_matrix(sys.b()));
    let names = sys
        .state_names
        .iter()
        .chain(inp.input_names())
        .cloned()
        .collect();
    let circuit =
        AffineOde::with_exogenous(ahat, vec![0.0; n + m], names, n)?.with_output(sys.output_index);
    let input = AffineOde::new(inp.d().clone(), inp.offset().to_vec(), inp.state_names())?;
    Ok(ComposedOde {
        circuit,
        input,
        input_init: inp.initial(),
    })
}

fn check_input_names(sys: &DaeSystem, inp: &InputModel) -> Result<()> {
    if sys.input_names() != inp.input_names() {
        return Err(Error::DimensionMismatch(format!(
            "DAE inputs {:?} do not match input model {:?}",
            sys.input_names(),
            inp.input_names()
        )));
    }
    Ok(())
}
