use adgeom::bloch::DampingParameter;
use adgeom::quantum::{
    apply_gate, kraus_amplitude_damping, DensityMatrix, GateKind, PureState, QuantumState, C64,
};
use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M = DMatrix<Complex<f64>>;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> M {
    let d = 1 << n;
    let g = M::from_fn(d, d, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn to_ours(m: &M, n: usize) -> DensityMatrix {
    let d = m.nrows();
    let entries = (0..d * d)
        .map(|k| C64::new(m[(k / d, k % d)].re, m[(k / d, k % d)].im))
        .collect();
    DensityMatrix::from_entries(n, entries).unwrap()
}

fn max_diff(ours: &DensityMatrix, m: &M) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let z = ours.get(i, j);
            worst = worst.max((c(z.re, z.im) - m[(i, j)]).norm());
        }
    }
    worst
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with qubit 0 as the leftmost factor.
fn embed(op: &M, qubit: usize, n: usize) -> M {
    let id = M::identity(2, 2);
    let mut out = M::identity(1, 1);
    for q in 0..n {
        out = out.kronecker(if q == qubit { op } else { &id });
    }
    out
}

fn two_by_two(m: [[C64; 2]; 2]) -> M {
    M::from_fn(2, 2, |i, j| c(m[i][j].re, m[i][j].im))
}

fn gate_matrix(gate: GateKind, n: usize) -> M {
    match gate {
        GateKind::Cnot { control, target } => {
            let d = 1 << n;
            let bit = |q: usize| 1usize << (n - 1 - q);
            M::from_fn(d, d, |i, j| {
                let image = if j & bit(control) != 0 {
                    j ^ bit(target)
                } else {
                    j
                };
                if i == image {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
        }
        single => embed(
            &two_by_two(single.single_qubit_matrix().unwrap()),
            match single {
                GateKind::H(q) | GateKind::T(q) => q,
                _ => unreachable!(),
            },
            n,
        ),
    }
}

#[test]
fn kraus_matches_explicit_kronecker_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let n = 2 + trial % 3;
        let gamma = rng.gen_range(0.0..=1.0);
        let k = kraus_amplitude_damping(DampingParameter::new(gamma).unwrap());
        let (e0, e1) = (two_by_two(k.e0), two_by_two(k.e1));
        let rho = random_density(&mut rng, n);
        let q = rng.gen_range(0..n);
        let (a, b) = (embed(&e0, q, n), embed(&e1, q, n));
        let want = &a * &rho * a.adjoint() + &b * &rho * b.adjoint();
        let mut ours = to_ours(&rho, n);
        ours.apply_kraus(q, &k).unwrap();
        assert!(max_diff(&ours, &want) < 1e-14, "n={n} q={q} gamma={gamma}");
    }
}

#[test]
fn gates_match_explicit_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 3;
    for _ in 0..60 {
        let gate = match rng.gen_range(0..3) {
            0 => GateKind::H(rng.gen_range(0..n)),
            1 => GateKind::T(rng.gen_range(0..n)),
            _ => {
                let control = rng.gen_range(0..n);
                GateKind::Cnot {
                    control,
                    target: (control + rng.gen_range(1..n)) % n,
                }
            }
        };
        let rho = random_density(&mut rng, n);
        let u = gate_matrix(gate, n);
        let want = &u * &rho * u.adjoint();
        let got = apply_gate(&to_ours(&rho, n), gate).unwrap();
        assert!(max_diff(&got, &want) < 1e-14, "{gate:?}");
    }
}

#[test]
fn kraus_completeness_for_random_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let k = kraus_amplitude_damping(DampingParameter::new(rng.gen_range(0.0..=1.0)).unwrap());
        let s = k.completeness();
        for (i, row) in s.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((z - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn pure_and_mixed_evolution_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let n = 4;
    let amps: Vec<C64> = (0..1 << n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut psi = PureState::from_amplitudes(amps).unwrap();
    let mut rho = psi.to_density();
    for _ in 0..200 {
        let gate = match rng.gen_range(0..3) {
            0 => GateKind::H(rng.gen_range(0..n)),
            1 => GateKind::T(rng.gen_range(0..n)),
            _ => GateKind::Cnot {
                control: 1,
                target: 3,
            },
        };
        psi.apply_gate(gate).unwrap();
        rho.apply_gate(gate).unwrap();
    }
    let want = psi.to_density();
    for i in 0..1 << n {
        for j in 0..1 << n {
            assert!((rho.get(i, j) - want.get(i, j)).norm() < 1e-12);
        }
    }
    let (pp, pr) = (psi.diag_probs().unwrap(), rho.diag_probs().unwrap());
    assert!(pp.iter().zip(&pr).all(|(a, b)| (a - b).abs() < 1e-12));
}
