use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use ddg_core::deform::{check_triangle_compat, conformal_deformation, edge_rates, pattern_deformation};
use ddg_core::hqd::{self, harmonic_from_qdiff, qdiff_from_harmonic, qdiff_moebius_pushforward_check, verify_qdiff};
use ddg_core::laplace::{check_harmonic, gradient_scale, laplacian, solve_dirichlet, HARMONIC_TOL};
use ddg_core::mesh::{EdgeId, FaceId};
use ddg_core::moebius::{
    eta_defects, eta_from_mu, mu_from_deformation, transition_matrices, verify_eta_closed, Mat2, Mobius,
};
use ddg_core::realization::{check_conformal_equiv, check_pattern, cross_ratios, intersection_angles, DEFAULT_TOL};
use ddg_core::weierstrass::{
    dual_planarity, dual_polygons, family_turns, k_scaling_defect, verify_minimal, weierstrass_integrate,
};
use ddg_core::{Complex64, Error, Realization, TriMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use super::{
    CheckCmd, Cli, Command, DeformCmd, DeformKind, HarmonicCmd, HqdCmd, MeshCmd, MinimalCmd, MoebiusCmd, Options,
    Outcome,
};
use crate::error::CliError;
use crate::json::{self, complex, complexes, document, edge_key, edge_map, num, reals};
use crate::obj::{self, Obj};

/// Default tolerance of the vertex-sum and η-closedness checks.
const HOLOMORPHIC_TOL: f64 = 1e-9;
/// Default tolerance of the per-face rate closure in `deform check`.
const COMPAT_TOL: f64 = 1e-10;
/// Default tolerance of the transition-matrix identities.
const TRANSITION_TOL: f64 = 1e-9;
/// Default tolerance of the parallel-edge condition for minimal surfaces.
const MINIMAL_TOL: f64 = 1e-9;

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    match &cli.command {
        Command::Mesh(MeshCmd::Info { mesh }) => mesh_info(o, mesh),
        Command::Check(CheckCmd::Conformal { a, b }) => check_equiv(o, a, b, false),
        Command::Check(CheckCmd::Pattern { a, b }) => check_equiv(o, a, b, true),
        Command::Harmonic(HarmonicCmd::Solve { mesh, boundary }) => harmonic_solve(o, mesh, boundary),
        Command::Harmonic(HarmonicCmd::Check { mesh, h }) => harmonic_check(o, mesh, h),
        Command::Deform(DeformCmd::Build { mesh, u, kind }) => deform_build(o, mesh, u, *kind),
        Command::Deform(DeformCmd::Check { mesh, zdot }) => deform_check(o, mesh, zdot),
        Command::Hqd(HqdCmd::Check { mesh, q }) => hqd_check(o, mesh, q),
        Command::Hqd(HqdCmd::FromHarmonic { mesh, u }) => hqd_from_harmonic(mesh, u),
        Command::Hqd(HqdCmd::ToHarmonic { mesh, q }) => hqd_to_harmonic(o, mesh, q),
        Command::Hqd(HqdCmd::MoebiusTest { mesh, q, count, seed }) => hqd_moebius_test(o, mesh, q, *count, *seed),
        Command::Moebius(MoebiusCmd::Eta { mesh, mu }) => moebius_eta(o, mesh, mu),
        Command::Moebius(MoebiusCmd::Mu { mesh, zdot }) => moebius_mu(mesh, zdot),
        Command::Moebius(MoebiusCmd::Transitions { a, b }) => moebius_transitions(o, a, b),
        Command::Minimal(MinimalCmd::Build { mesh, q, alpha }) => minimal_build(o, mesh, q, alpha),
        Command::Minimal(MinimalCmd::Verify { gauss, dual }) => minimal_verify(o, gauss, dual),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

fn load_obj(path: &Path) -> Result<Obj> {
    Obj::parse(&read(path)?).map_err(|e| CliError::Obj { path: path.to_path_buf(), source: e })
}

fn load_planar(path: &Path) -> Result<(TriMesh, Vec<Complex64>)> {
    load_obj(path)?.planar().map_err(|e| CliError::Obj { path: path.to_path_buf(), source: e })
}

fn load_json(path: &Path) -> Result<Value> {
    json::parse(&read(path)?).map_err(|e| CliError::Format { path: path.to_path_buf(), source: e })
}

/// Attaches `path` to a document-level format error.
fn in_file<T>(path: &Path, r: std::result::Result<T, json::FormatError>) -> Result<T> {
    r.map_err(|e| CliError::Format { path: path.to_path_buf(), source: e })
}

/// Converts a core error, naming edges by their `"i-j"` key.
fn core_err(mesh: &TriMesh, e: Error) -> CliError {
    let edge = match e {
        Error::IntegrationDefect { edge, .. }
        | Error::ClosureDefect { edge, .. }
        | Error::NotRealizable { edge, .. }
        | Error::NotMinimal { edge, .. } => Some(edge),
        _ => None,
    };
    let edge_key = edge.filter(|&e| e < mesh.edge_count()).map(|e| edge_key(mesh, e));
    CliError::Core { source: e, edge_key }
}

trait OnMesh<T> {
    fn on(self, mesh: &TriMesh) -> Result<T>;
}

impl<T> OnMesh<T> for std::result::Result<T, Error> {
    fn on(self, mesh: &TriMesh) -> Result<T> {
        self.map_err(|e| core_err(mesh, e))
    }
}

fn opt_edge(mesh: &TriMesh, e: Option<EdgeId>) -> Value {
    e.map_or(Value::Null, |e| edge_key(mesh, e).into())
}

fn opt_id(v: Option<usize>) -> Value {
    v.map_or(Value::Null, Value::from)
}

fn matrix(m: &Mat2) -> Value {
    Value::Array(m.0.iter().map(|row| Value::Array(row.iter().map(|&x| complex(x)).collect())).collect())
}

fn same_mesh(a: &TriMesh, b: &TriMesh) -> Result<()> {
    if a.vertex_count() == b.vertex_count() && a.faces() == b.faces() {
        Ok(())
    } else {
        Err(Error::MeshMismatch.into())
    }
}

fn mesh_info(o: &Options, path: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(path)?;
    let r = Realization::new(&m, z)?;
    let mut doc = document([
        ("command", "mesh info".into()),
        ("vertices", m.vertex_count().into()),
        ("edges", m.edge_count().into()),
        ("faces", m.face_count().into()),
        ("interior_vertices", m.interior_vertices().len().into()),
        ("interior_edges", m.interior_edges().len().into()),
        ("boundary_vertices", m.boundary_vertices().len().into()),
        ("euler_characteristic", m.euler_characteristic().into()),
        ("disk", m.is_disk().into()),
    ]);
    if o.report {
        let cr = cross_ratios(&r)?;
        let phi = intersection_angles(&r)?;
        doc["cross_ratios"] = edge_map(&m, m.interior_edges(), |e| complex(cr[e]));
        doc["intersection_angles"] = edge_map(&m, m.interior_edges(), |e| num(phi[e]));
    }
    Ok(Outcome::new(doc, true))
}

fn check_equiv(o: &Options, a: &Path, b: &Path, pattern: bool) -> Result<Outcome> {
    let (ma, za) = load_planar(a)?;
    let (mb, zb) = load_planar(b)?;
    same_mesh(&ma, &mb)?;
    let (ra, rb) = (Realization::new(&ma, za)?, Realization::new(&ma, zb)?);
    let tol = o.tol.unwrap_or(DEFAULT_TOL);
    let (rep, name, key) = if pattern {
        (check_pattern(&ra, &rb, tol)?, "check pattern", "alpha")
    } else {
        (check_conformal_equiv(&ra, &rb, tol)?, "check conformal", "u")
    };
    let doc = document([
        ("command", name.into()),
        ("passed", rep.equivalent.into()),
        ("tol", num(tol)),
        ("max_defect", num(rep.max_defect)),
        ("worst_edge", opt_edge(&ma, rep.worst_edge)),
        ("spread", num(rep.spread)),
        (key, rep.vertex_values.as_deref().map_or(Value::Null, reals)),
    ]);
    Ok(Outcome::new(doc, rep.equivalent))
}

fn harmonic_solve(o: &Options, mesh: &Path, boundary: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let data = load_json(boundary)?;
    let b = in_file(boundary, json::boundary_data(&data, m.vertex_count()))?;
    let r = Realization::new(&m, z)?;
    let sol = solve_dirichlet(&r, &b)?;
    let mut doc = document([("h", reals(&sol.h))]);
    if o.report {
        doc["residual"] = num(sol.residual);
        doc["refinement_steps"] = sol.refinement_steps.into();
        doc["bandwidth"] = sol.bandwidth.into();
    }
    Ok(Outcome::new(doc, true))
}

fn harmonic_check(o: &Options, mesh: &Path, hpath: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let h = in_file(hpath, json::vertex_reals(&load_json(hpath)?, &["h", "u"]))?;
    let r = Realization::new(&m, z)?;
    let tol = o.tol.unwrap_or(HARMONIC_TOL);
    let lh = laplacian(&r, &h)?;
    let passed = match check_harmonic(&r, &h, tol) {
        Ok(()) => true,
        Err(Error::NotHarmonic { .. }) => false,
        Err(e) => return Err(e.into()),
    };
    let (worst, max) =
        lh.iter().enumerate().fold((None, 0.0), |(w, m), (v, x)| if x.abs() > m { (Some(v), x.abs()) } else { (w, m) });
    let mut doc = document([
        ("command", "harmonic check".into()),
        ("passed", passed.into()),
        ("tol", num(tol)),
        ("max_residual", num(max)),
        ("gradient_scale", num(gradient_scale(&m, &h))),
        ("worst_vertex", opt_id(worst)),
    ]);
    if o.report {
        doc["laplacian"] = reals(&lh);
    }
    Ok(Outcome::new(doc, passed))
}

fn deform_build(o: &Options, mesh: &Path, upath: &Path, kind: DeformKind) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let keys: &[&str] = if kind == DeformKind::Conformal { &["u", "h"] } else { &["alpha", "h"] };
    let u = in_file(upath, json::vertex_reals(&load_json(upath)?, keys))?;
    let r = Realization::new(&m, z)?;
    let d = match kind {
        DeformKind::Conformal => conformal_deformation(&r, &u, o.gauge()),
        DeformKind::Pattern => pattern_deformation(&r, &u, o.gauge()),
    }
    .on(&m)?;
    let kind = if kind == DeformKind::Conformal { "conformal" } else { "pattern" };
    let doc = document([
        ("kind", kind.into()),
        ("zdot", complexes(&d.zdot)),
        ("closure_defect", num(d.closure_defect)),
        ("worst_edge", opt_edge(&m, d.worst_edge)),
    ]);
    Ok(Outcome::new(doc, true))
}

fn deform_check(o: &Options, mesh: &Path, zpath: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let zdot = in_file(zpath, json::vertex_complexes(&load_json(zpath)?, "zdot"))?;
    let r = Realization::new(&m, z)?;
    let tol = o.tol.unwrap_or(COMPAT_TOL);
    let rates = edge_rates(&r, &zdot)?;
    let rep = check_triangle_compat(&r, &rates, tol)?;
    let faces: Vec<Value> = (0..m.face_count())
        .map(|f: FaceId| {
            let mut row = serde_json::Map::new();
            row.insert("face".into(), f.into());
            row.insert("closure".into(), complex(rep.closure[f]));
            row.insert("omega".into(), num(rep.face_rates.omega[f]));
            row.insert("sigma".into(), num(rep.face_rates.sigma[f]));
            Value::Object(row)
        })
        .collect();
    let doc = document([
        ("command", "deform check".into()),
        ("passed", rep.passed().into()),
        ("tol", num(tol)),
        ("max_closure", num(rep.max_closure)),
        ("worst_face", opt_id(rep.worst_face)),
        ("omega_spread", num(rep.omega_spread)),
        ("sigma_spread", num(rep.sigma_spread)),
        ("circumradius_defect", num(rep.circumradius_defect)),
        ("faces", Value::Array(faces)),
    ]);
    Ok(Outcome::new(doc, rep.passed()))
}

fn load_qdiff(m: &TriMesh, path: &Path) -> Result<hqd::QuadDiff> {
    in_file(path, json::read_qdiff(m, &load_json(path)?))
}

fn qdiff_summary(doc: &mut Value, rep: &hqd::QdiffReport) {
    doc["max_defect"] = num(rep.max_defect());
    doc["max_sum"] = num(rep.max_sum);
    doc["max_sum_dz"] = num(rep.max_sum_dz);
    doc["max_real"] = num(rep.max_real);
    doc["worst_vertex"] = opt_id(rep.worst_vertex);
}

fn hqd_check(o: &Options, mesh: &Path, qpath: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let q = load_qdiff(&m, qpath)?;
    let r = Realization::new(&m, z)?;
    let tol = o.tol.unwrap_or(HOLOMORPHIC_TOL);
    let rep = verify_qdiff(&r, &q, tol)?;
    let mut doc = document([("command", "hqd check".into()), ("passed", rep.holomorphic().into()), ("tol", num(tol))]);
    qdiff_summary(&mut doc, &rep);
    if o.report {
        doc["vertices"] = Value::Array(
            rep.vertices
                .iter()
                .map(|d| {
                    let mut row = serde_json::Map::new();
                    row.insert("vertex".into(), d.vertex.into());
                    row.insert("sum".into(), complex(d.sum));
                    row.insert("sum_dz".into(), complex(d.sum_dz));
                    Value::Object(row)
                })
                .collect(),
        );
    }
    Ok(Outcome::new(doc, rep.holomorphic()))
}

fn hqd_from_harmonic(mesh: &Path, upath: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let u = in_file(upath, json::vertex_reals(&load_json(upath)?, &["u", "h"]))?;
    let r = Realization::new(&m, z)?;
    let q = qdiff_from_harmonic(&r, &u).on(&m)?;
    Ok(Outcome::new(document([("q", json::qdiff(&m, &q))]), true))
}

fn hqd_to_harmonic(o: &Options, mesh: &Path, qpath: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let q = load_qdiff(&m, qpath)?;
    let r = Realization::new(&m, z)?;
    let h = harmonic_from_qdiff(&r, &q, o.gauge()).on(&m)?;
    let doc = document([
        ("u", reals(&h.u)),
        ("tau_defect", num(h.tau_defect)),
        ("side_defect", num(h.side_defect)),
        ("omega_defect", num(h.omega_defect)),
    ]);
    Ok(Outcome::new(doc, true))
}

/// `count` Möbius maps with coefficients in the unit disk whose poles stay
/// away from every vertex, drawn from a seeded ChaCha stream.
pub fn sample_moebius(r: &Realization, count: usize, seed: u64) -> Result<Vec<Mobius>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disk = move || loop {
        let p = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if p.norm_sqr() < 1.0 {
            break p;
        }
    };
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(CliError::Usage("could not find Möbius maps keeping the mesh finite".into()));
        }
        let (a, b, c, d) = (disk(), disk(), disk(), disk());
        let Some(phi) = Mobius::new(a, b, c, d) else { continue };
        let m = phi.matrix();
        let far = r.z().iter().all(|&z| (m.0[1][0] * z + m.0[1][1]).norm() > 1e-3 * m.max_abs());
        if far {
            out.push(phi);
        }
    }
    Ok(out)
}

fn hqd_moebius_test(o: &Options, mesh: &Path, qpath: &Path, count: usize, seed: u64) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let q = load_qdiff(&m, qpath)?;
    let r = Realization::new(&m, z)?;
    let tol = o.tol.unwrap_or(HOLOMORPHIC_TOL);
    let base = verify_qdiff(&r, &q, tol)?;
    let maps = sample_moebius(&r, count, seed)?;
    let reports = maps
        .par_iter()
        .map(|phi| qdiff_moebius_pushforward_check(&r, &q, phi, tol))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let (worst, max) = reports.iter().enumerate().fold((None, 0.0), |(w, m), (k, rep)| {
        if rep.max_defect() > m {
            (Some(k), rep.max_defect())
        } else {
            (w, m)
        }
    });
    let passed = base.holomorphic() && reports.iter().all(|rep| rep.holomorphic());
    let mut doc = document([
        ("command", "hqd moebius-test".into()),
        ("passed", passed.into()),
        ("tol", num(tol)),
        ("maps", count.into()),
        ("seed", seed.into()),
        ("original_defect", num(base.max_defect())),
        ("max_defect", num(max)),
        ("worst_map", opt_id(worst)),
    ]);
    if o.report {
        doc["per_map"] = Value::Array(
            maps.iter()
                .zip(&reports)
                .map(|(phi, rep)| {
                    let mut row = serde_json::Map::new();
                    row.insert("matrix".into(), matrix(phi.matrix()));
                    row.insert("max_defect".into(), num(rep.max_defect()));
                    Value::Object(row)
                })
                .collect(),
        );
    }
    Ok(Outcome::new(doc, passed))
}

fn moebius_mu(mesh: &Path, zpath: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let zdot = in_file(zpath, json::vertex_complexes(&load_json(zpath)?, "zdot"))?;
    let r = Realization::new(&m, z)?;
    let mu = mu_from_deformation(&r, &zdot)?;
    Ok(Outcome::new(document([("mu", edge_map(&m, m.interior_edges(), |e| complex(mu[e])))]), true))
}

fn moebius_eta(o: &Options, mesh: &Path, mpath: &Path) -> Result<Outcome> {
    let (m, z) = load_planar(mesh)?;
    let mu = in_file(mpath, json::read_edge_complexes(&m, &load_json(mpath)?, "mu"))?;
    let r = Realization::new(&m, z)?;
    let tol = o.tol.unwrap_or(HOLOMORPHIC_TOL);
    let eta = eta_from_mu(&r, &mu)?;
    let (eigen, pauli) = eta_defects(&r, &mu, &eta);
    let rep = verify_eta_closed(&r, &eta, tol)?;
    let forms = edge_map(&m, m.interior_edges(), |e| {
        let mut row = serde_json::Map::new();
        row.insert("mu".into(), complex(mu[e]));
        row.insert("matrix".into(), matrix(&eta.matrices[e]));
        row.insert("vector".into(), complexes(&eta.vectors[e].0));
        Value::Object(row)
    });
    let doc = document([
        ("command", "moebius eta".into()),
        ("passed", rep.closed().into()),
        ("tol", num(tol)),
        ("matrix_closed", rep.matrix_closed.into()),
        ("scalar_closed", rep.scalar_closed.into()),
        ("max_matrix_sum", num(rep.max_matrix_sum)),
        ("max_scalar_sum", num(rep.max_scalar_sum)),
        ("worst_vertex", opt_id(rep.worst_vertex)),
        ("eigen_defect", num(eigen)),
        ("pauli_defect", num(pauli)),
        ("eta", forms),
    ]);
    Ok(Outcome::new(doc, rep.closed()))
}

fn moebius_transitions(o: &Options, a: &Path, b: &Path) -> Result<Outcome> {
    let (ma, za) = load_planar(a)?;
    let (mb, zb) = load_planar(b)?;
    same_mesh(&ma, &mb)?;
    let (ra, rb) = (Realization::new(&ma, za)?, Realization::new(&ma, zb)?);
    let tol = o.tol.unwrap_or(TRANSITION_TOL);
    let rep = transition_matrices(&ra, &rb)?;
    let passed =
        [rep.eigen_defect, rep.det_defect, rep.product_defect, rep.cross_ratio_defect].iter().all(|&d| d <= tol);
    let mut doc = document([
        ("command", "moebius transitions".into()),
        ("passed", passed.into()),
        ("tol", num(tol)),
        ("eigen_defect", num(rep.eigen_defect)),
        ("det_defect", num(rep.det_defect)),
        ("product_defect", num(rep.product_defect)),
        ("worst_vertex", opt_id(rep.worst_vertex)),
        ("cross_ratio_defect", num(rep.cross_ratio_defect)),
        ("worst_edge", opt_edge(&ma, rep.worst_edge)),
    ]);
    if o.report {
        doc["faces"] = Value::Array(rep.faces.iter().map(matrix).collect());
        doc["edges"] = edge_map(&ma, ma.interior_edges(), |e| {
            let mut row = serde_json::Map::new();
            row.insert("g".into(), matrix(&rep.g[e]));
            row.insert("lambda".into(), complex(rep.lambda[e]));
            Value::Object(row)
        });
    }
    Ok(Outcome::new(doc, passed))
}

/// The associate-family angles written when `--alpha` is not given.
pub fn default_alphas() -> Vec<f64> {
    vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI]
}

/// `prefix` with `suffix` appended to its final component.
fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn file_name(p: &Path) -> Value {
    p.file_name().map_or(Value::Null, |n| n.to_string_lossy().into_owned().into())
}

/// Members of the associate family that must be minimal: `α ≡ 0` or `π`.
/// Only `f^0` and `f^π = -f^0` are minimal in general.
fn must_be_minimal(alpha: f64) -> bool {
    let t = family_turns(alpha);
    t == 0.0 || t == 0.5
}

fn minimal_build(o: &Options, mesh: &Path, qpath: &Path, alphas: &[f64]) -> Result<Outcome> {
    let prefix = o.output.clone().ok_or_else(|| CliError::Usage("minimal build needs -o <prefix>".into()))?;
    let (m, z) = load_planar(mesh)?;
    let q = load_qdiff(&m, qpath)?;
    let r = Realization::new(&m, z)?;
    let tol = o.tol.unwrap_or(MINIMAL_TOL);
    let alphas = if alphas.is_empty() { default_alphas() } else { alphas.to_vec() };
    let surf = weierstrass_integrate(&r, &q, o.gauge(), tol).on(&m)?;
    let polys: Vec<Vec<usize>> = dual_polygons(&m).into_iter().map(|(_, p)| p).collect();

    let members = alphas
        .par_iter()
        .map(|&alpha| {
            let f = surf.at(alpha);
            let rep = verify_minimal(&m, &surf.gauss, &f, tol)?;
            let path = with_suffix(&prefix, &format!("_a{alpha}.obj"));
            let text = Obj { positions: f.clone(), faces: polys.clone() }.to_obj_string();
            Ok((alpha, f, rep, path, text))
        })
        .collect::<std::result::Result<Vec<_>, Error>>()?;

    let mut passed = true;
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for (alpha, f, rep, path, text) in members {
        let required = must_be_minimal(alpha);
        passed &= !required || rep.passed();
        let mut row = serde_json::Map::new();
        row.insert("alpha".into(), num(alpha));
        row.insert("file".into(), file_name(&path));
        row.insert("required_minimal".into(), required.into());
        row.insert("minimal".into(), rep.passed().into());
        row.insert("max_residual".into(), num(rep.max_residual));
        row.insert("worst_edge".into(), opt_edge(&m, rep.worst_edge));
        row.insert("max_orthogonal".into(), num(rep.max_orthogonal));
        row.insert("dual_planarity".into(), num(dual_planarity(&m, &f)));
        if required {
            // f^π = -f^0 carries -k.
            let sign = if family_turns(alpha) == 0.0 { 1.0 } else { -1.0 };
            let k: Vec<f64> = surf.k.iter().map(|k| sign * k).collect();
            row.insert("k_scaling_defect".into(), num(k_scaling_defect(&r, &f, &k)));
        }
        if o.report {
            row.insert("residual".into(), edge_map(&m, m.interior_edges(), |e| num(rep.residual[e])));
        }
        rows.push(Value::Object(row));
        files.push((path, text));
    }
    let gauss_path = with_suffix(&prefix, "_gauss.obj");
    files.push((gauss_path.clone(), obj::spatial_obj(&m, &surf.gauss)));
    let report_path = with_suffix(&prefix, "_report.json");
    let doc = document([
        ("command", "minimal build".into()),
        ("passed", passed.into()),
        ("tol", num(tol)),
        ("closure_defect", num(surf.closure_defect)),
        ("closure_scale", num(surf.scale)),
        ("gauss", file_name(&gauss_path)),
        ("alphas", Value::Array(rows)),
        ("k", edge_map(&m, m.interior_edges(), |e| num(surf.k[e]))),
    ]);
    files.push((report_path, json::to_string(&doc)));
    Ok(Outcome { doc, passed, files })
}

fn minimal_verify(o: &Options, gauss: &Path, dual: &Path) -> Result<Outcome> {
    let g = load_obj(gauss)?;
    let m = g.tri_mesh().map_err(|e| CliError::Obj { path: gauss.to_path_buf(), source: e })?;
    let d = load_obj(dual)?;
    let expected: Vec<Vec<FaceId>> = dual_polygons(&m).into_iter().map(|(_, p)| p).collect();
    if d.positions.len() != m.face_count() || d.faces != expected {
        return Err(Error::MeshMismatch.into());
    }
    let tol = o.tol.unwrap_or(MINIMAL_TOL);
    let rep = verify_minimal(&m, &g.positions, &d.positions, tol).on(&m)?;
    let mut doc = document([
        ("command", "minimal verify".into()),
        ("passed", rep.passed().into()),
        ("tol", num(tol)),
        ("max_residual", num(rep.max_residual)),
        ("worst_edge", opt_edge(&m, rep.worst_edge)),
        ("max_orthogonal", num(rep.max_orthogonal)),
    ]);
    if o.report {
        doc["residual"] = edge_map(&m, m.interior_edges(), |e| num(rep.residual[e]));
        doc["k"] = edge_map(&m, m.interior_edges(), |e| num(rep.k[e]));
    }
    Ok(Outcome::new(doc, rep.passed()))
}
