use eddm::deform::{
    deform_ddm, deform_eddm, deform_lbs, precompute_omega, DeformConfig, Deformer, Mode, Omega, SkinWeights,
};
use eddm::mesh::{cotangent_weights, Precision, SmoothingConfig, TriMesh};
use eddm::numerics::{AffineTransform, Mat3, Quat, Vec3};
use eddm::rig::SkinningMatrices;
use proptest::prelude::*;
use std::sync::OnceLock;

/// Closed tube along Y: `rings × segments` side vertices plus two cap centres.
fn capped_tube(segments: usize, rings: usize, radius: f64, length: f64) -> TriMesh {
    let mut p = Vec::new();
    for r in 0..rings {
        let y = length * r as f64 / (rings - 1) as f64;
        for s in 0..segments {
            let theta = std::f64::consts::TAU * s as f64 / segments as f64;
            p.push(Vec3::new(radius * theta.cos(), y, radius * theta.sin()));
        }
    }
    let bottom = p.len();
    p.push(Vec3::ZERO);
    p.push(Vec3::new(0.0, length, 0.0));
    let top = bottom + 1;
    let mut t = Vec::new();
    for r in 0..rings - 1 {
        for s in 0..segments {
            let a = r * segments + s;
            let b = r * segments + (s + 1) % segments;
            t.push([a, a + segments, b + segments]);
            t.push([a, b + segments, b]);
        }
    }
    let last = (rings - 1) * segments;
    for s in 0..segments {
        let n = (s + 1) % segments;
        t.push([bottom, s, n]);
        t.push([top, last + n, last + s]);
    }
    TriMesh::new(p, t).unwrap()
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

fn two_joint_weights(mesh: &TriMesh, length: f64) -> SkinWeights {
    SkinWeights::new(
        mesh.positions()
            .iter()
            .map(|p| {
                let s = smoothstep(p.y / length * 3.0 - 1.0);
                vec![(0, 1.0 - s), (1, s)]
            })
            .collect(),
    )
    .unwrap()
}

fn fixture() -> &'static Deformer {
    static CELL: OnceLock<Deformer> = OnceLock::new();
    CELL.get_or_init(|| {
        let mesh = capped_tube(12, 16, 1.0, 6.0);
        let weights = two_joint_weights(&mesh, 6.0);
        Deformer::new(mesh, weights, &DeformConfig::default()).unwrap()
    })
}

fn max_dev(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm()).fold(0.0, f64::max)
}

fn arb_rotation() -> impl Strategy<Value = Mat3> {
    (prop::array::uniform3(-1.0f64..1.0), -3.1f64..3.1)
        .prop_filter("axis", |(a, _)| Vec3::from_array(*a).norm() > 1e-3)
        .prop_map(|(a, angle)| Quat::from_axis_angle(Vec3::from_array(a), angle).to_mat3())
}

fn arb_rigid() -> impl Strategy<Value = AffineTransform> {
    (arb_rotation(), prop::array::uniform3(-5.0f64..5.0)).prop_map(|(r, t)| AffineTransform::new(r, Vec3::from_array(t)))
}

/// Invertible affine map: rotation · (upper-triangular shear) · positive scale.
fn arb_affine() -> impl Strategy<Value = AffineTransform> {
    (arb_rigid(), prop::array::uniform3(0.3f64..3.0), prop::array::uniform3(-0.8f64..0.8)).prop_map(|(g, s, sh)| {
        let shear = Mat3::from_rows([[1.0, sh[0], sh[1]], [0.0, 1.0, sh[2]], [0.0, 0.0, 1.0]]);
        AffineTransform::new(g.linear * shear * Mat3::from_diagonal(Vec3::from_array(s)), g.translation)
    })
}

/// `Ω_ij = Σ_k B_ik w_kj P_k` with `B` formed as an explicit dense matrix power.
fn dense_omega(mesh: &TriMesh, weights: &SkinWeights, kappa: f64, p: u32) -> Vec<Vec<[[f64; 4]; 4]>> {
    let n = mesh.vertex_count();
    let w = cotangent_weights(mesh, Precision::Double);
    let mut step = vec![vec![0.0; n]; n];
    for i in 0..n {
        step[i][i] = 1.0 - kappa;
        for (j, v) in w.row(i) {
            step[i][j] += kappa * v;
        }
    }
    let mut b: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..p {
        b = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| step[i][k] * b[k][j]).sum()).collect())
            .collect();
    }
    let joints = weights.joint_count();
    (0..n)
        .map(|i| {
            (0..joints)
                .map(|j| {
                    let mut out = [[0.0; 4]; 4];
                    for k in 0..n {
                        let u = mesh.positions()[k];
                        let h = [u.x, u.y, u.z, 1.0];
                        let s = b[i][k] * weights.weight(k, j);
                        for r in 0..4 {
                            for c in 0..4 {
                                out[r][c] += s * h[r] * h[c];
                            }
                        }
                    }
                    out
                })
                .collect()
        })
        .collect()
}

#[test]
fn omega_matches_dense_oracle_on_a_triangle() {
    let mesh = TriMesh::new(
        vec![Vec3::new(0.2, -0.1, 0.4), Vec3::new(1.3, 0.2, -0.5), Vec3::new(0.1, 0.9, 0.7)],
        vec![[0, 1, 2]],
    )
    .unwrap();
    let weights = SkinWeights::new(vec![vec![(0, 0.5), (1, 0.5)]; 3]).unwrap();
    let w = cotangent_weights(&mesh, Precision::Double);
    let table = precompute_omega(&mesh, &weights, &w, &SmoothingConfig::new(0.5, 2).unwrap(), 0.0).unwrap();
    let oracle = dense_omega(&mesh, &weights, 0.5, 2);
    for i in 0..3 {
        assert_eq!(table.row(i).len(), 2);
        for e in table.row(i) {
            for r in 0..4 {
                for c in 0..4 {
                    assert!((e.omega.get(r, c) - oracle[i][e.joint][r][c]).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn omega_matches_dense_oracle_on_a_tube() {
    let mesh = capped_tube(6, 5, 1.0, 3.0);
    let weights = two_joint_weights(&mesh, 3.0);
    let w = cotangent_weights(&mesh, Precision::Double);
    let table = precompute_omega(&mesh, &weights, &w, &SmoothingConfig::new(0.5, 6).unwrap(), 0.0).unwrap();
    let oracle = dense_omega(&mesh, &weights, 0.5, 6);
    for i in 0..mesh.vertex_count() {
        let corners: f64 = oracle[i].iter().map(|o| o[3][3]).sum();
        assert!((corners - 1.0).abs() < 1e-12);
        for e in table.row(i) {
            let expected = &oracle[i][e.joint];
            assert!((0..16).all(|k| (e.omega.get(k / 4, k % 4) - expected[k / 4][k % 4]).abs() <= 1e-12));
        }
    }
}

#[test]
fn identity_pose_reproduces_rest() {
    let d = fixture();
    let m = SkinningMatrices::identity(2);
    for mode in Mode::ALL {
        let out = d.deform(mode, &m).unwrap();
        assert!(max_dev(&out.positions, d.mesh().positions()) <= 1e-9, "{mode}");
    }
}

#[test]
fn deformation_is_deterministic_across_thread_counts() {
    let d = fixture();
    let m = SkinningMatrices(vec![
        AffineTransform::from_linear(Mat3::from_diagonal(Vec3::new(1.0, 2.0, 1.0))),
        AffineTransform::new(Mat3::rotation_z(0.4).scale(0.5), Vec3::new(0.0, 1.0, 0.0)),
    ]);
    let run = |threads: usize, mode: Mode| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| d.deform(mode, &m).unwrap())
    };
    for mode in Mode::ALL {
        let one = run(1, mode);
        assert_eq!(one, run(3, mode));
        assert_eq!(one, run(8, mode));
    }
}

#[test]
fn tube_neighbourhoods_never_need_the_fallback() {
    let d = fixture();
    let m = SkinningMatrices(vec![
        AffineTransform::from_linear(Mat3::from_diagonal(Vec3::new(1.0, 2.0, 1.0))),
        AffineTransform::from_linear(Mat3::from_diagonal(Vec3::new(0.5, 0.5, 0.5))),
    ]);
    assert!(d.deform(Mode::Eddm, &m).unwrap().fallbacks.is_empty());
    assert!(d.deform(Mode::Ddm, &m).unwrap().fallbacks.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rigid_equivariance(g in arb_rigid(), m0 in arb_affine(), m1 in arb_affine()) {
        let d = fixture();
        let m = SkinningMatrices(vec![m0, m1]);
        let moved = m.premultiplied(&g);
        for mode in Mode::ALL {
            let base = d.deform(mode, &m).unwrap().positions;
            let out = d.deform(mode, &moved).unwrap().positions;
            let expected: Vec<Vec3> = base.iter().map(|&p| g.transform_point(p)).collect();
            prop_assert!(max_dev(&out, &expected) <= 1e-6, "{}", mode);
        }
    }

    #[test]
    fn eddm_reduces_to_ddm_for_rigid_joints(g0 in arb_rigid(), g1 in arb_rigid()) {
        let d = fixture();
        let m = SkinningMatrices(vec![g0, g1]);
        let a = deform_eddm(d.mesh(), d.omega(), &m).unwrap();
        let b = deform_ddm(d.mesh(), d.omega(), &m).unwrap();
        prop_assert!(max_dev(&a.positions, &b.positions) <= 1e-9);
    }

    #[test]
    fn single_joint_eddm_equals_lbs(m in arb_affine()) {
        let d = fixture();
        let weights = SkinWeights::rigid(d.mesh().vertex_count(), 0);
        let w = d.smoothing_weights();
        let table = precompute_omega(d.mesh(), &weights, w, &SmoothingConfig::default(), 1e-4).unwrap();
        let skin = SkinningMatrices(vec![m]);
        let eddm = deform_eddm(d.mesh(), &table, &skin).unwrap();
        let lbs = deform_lbs(d.mesh(), &weights, &skin).unwrap();
        prop_assert!(eddm.fallbacks.is_empty());
        prop_assert!(max_dev(&eddm.positions, &lbs.positions) <= 1e-6);
    }

    #[test]
    fn omega_blocks_are_consistent(i in 0usize..194) {
        // Ω restricted to a vertex is a positive-weighted sum of rank-one
        // [u;1][u;1]ᵀ terms, so its corner-normalized covariance is PSD.
        let d = fixture();
        let total = d.omega().row(i).iter().fold(Omega::default(), |acc, e| {
            Omega(std::array::from_fn(|k| acc.0[k] + e.omega.0[k]))
        });
        prop_assert!((total.c() - 1.0).abs() < 1e-9);
        let p = total.b();
        let cov = total.a_mat3() - Mat3::outer(p, p);
        let e = eddm::numerics::eig_sym3(&eddm::numerics::SymMat3::symmetric_part(&cov));
        prop_assert!(e.values[2] >= -1e-12);
    }
}
