use std::path::Path;
use std::sync::Arc;

use delsarte_core::delsarte::{self, Closure, SolveMode};
use delsarte_core::gelfand::{self, BiInvariantFunction, SphericalTable, SphericalTableExport};
use delsarte_core::group::EXHAUSTIVE_ASSOCIATIVITY_LIMIT;
use delsarte_core::homspace;
use delsarte_core::io::{self, Conventions, GroupRef};
use delsarte_core::lp::CertificateReport;
use delsarte_core::sphere::{self, IsotropicCoeffs, TuranSphereInstance};
use delsarte_core::{GroupFunction, GroupSubset};
use serde::{Deserialize, Serialize};

use crate::angle::parse_angle;
use crate::report::{load_group_arg, verdict, CmdResult, Ctx, RunInfo};
use crate::ModeArg;

const TABLE_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-9;
const BRACKET_TOL: f64 = 1e-9;
/// Lifted kernels larger than this are not written to disk.
const KERNEL_CSV_LIMIT: usize = 256;

// ---------------------------------------------------------------- group-inspect

#[derive(Serialize)]
struct TableInvariants {
    latin_square: bool,
    identity_first: bool,
    associativity: &'static str,
    inverses_consistent: bool,
}

#[derive(Serialize)]
struct GroupReport {
    run: RunInfo,
    conventions: Conventions,
    name: String,
    order: usize,
    abelian: bool,
    center: Vec<usize>,
    element_orders: Vec<usize>,
    inverses: Vec<usize>,
    invariants: TableInvariants,
}

pub fn group_inspect(ctx: &Ctx, arg: &str) -> CmdResult {
    let g = load_group_arg(arg)?;
    let n = g.order();
    let inverses: Vec<usize> = (0..n).map(|a| g.inv(a)).collect();
    let inverses_consistent = (0..n).all(|a| g.mul(a, inverses[a]) == 0 && g.mul(inverses[a], a) == 0);
    let report = GroupReport {
        run: ctx.run_info("group-inspect", vec![arg.to_string()], 0.0),
        conventions: ctx.conventions(),
        name: g.name().to_string(),
        order: n,
        abelian: g.is_abelian(),
        center: g.center(),
        element_orders: (0..n).map(|a| g.element_order(a)).collect(),
        inverses,
        invariants: TableInvariants {
            latin_square: true,
            identity_first: true,
            associativity: if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
                "exhaustive"
            } else {
                "sampled"
            },
            inverses_consistent,
        },
    };
    println!("group {} of order {n}", report.name);
    println!("abelian: {}", report.abelian);
    println!("center: {:?}", report.center);
    println!("table invariants: {}", verdict(inverses_consistent));
    let path = ctx.write_json("group_inspect.json", &report)?;
    println!("wrote {}", path.display());
    Ok(inverses_consistent)
}

// ---------------------------------------------------------------- gelfand

#[derive(Serialize)]
struct GelfandReport {
    run: RunInfo,
    conventions: Conventions,
    group: String,
    order: usize,
    k: Vec<usize>,
    num_classes: usize,
    classes: Vec<Vec<usize>>,
    class_sizes: Vec<usize>,
    inverse_class: Vec<usize>,
    gelfand: bool,
    functional_equation_residual: Option<f64>,
    orthogonality_residual: Option<f64>,
    table: Option<SphericalTableExport>,
}

pub fn gelfand(ctx: &Ctx, arg: &str, k: &[usize], k_gens: &[usize]) -> CmdResult {
    let g = load_group_arg(arg)?;
    let sub = if !k_gens.is_empty() {
        g.subgroup_from_generators(k_gens)?
    } else if !k.is_empty() {
        g.subgroup(k)?
    } else {
        g.trivial_subgroup()
    };
    let tol = ctx.tol_or(TABLE_TOL);
    let partition = gelfand::double_cosets(&g, &sub)?;
    let is_gelfand = partition.is_commutative();
    let table = if is_gelfand {
        Some(SphericalTable::compute(Arc::clone(&partition), ctx.seed)?)
    } else {
        None
    };
    let fe = table.as_ref().map(|t| t.functional_equation_residual());
    let orth = table.as_ref().map(|t| t.orthogonality_residual());
    let ok = fe.map_or(true, |r| r < tol) && orth.map_or(true, |r| r < tol);
    let report = GelfandReport {
        run: ctx.run_info("gelfand", vec![arg.to_string()], tol),
        conventions: ctx.conventions(),
        group: g.name().to_string(),
        order: g.order(),
        k: sub.elements().to_vec(),
        num_classes: partition.num_classes(),
        classes: partition.classes.clone(),
        class_sizes: partition.sizes.clone(),
        inverse_class: partition.inverse_class.clone(),
        gelfand: is_gelfand,
        functional_equation_residual: fe,
        orthogonality_residual: orth,
        table: table.as_ref().map(|t| t.export()),
    };
    println!("|G| = {}, |K| = {}, double cosets: {}", g.order(), sub.order(), partition.num_classes());
    println!("Gelfand pair: {is_gelfand}");
    if let Some(t) = &table {
        println!("spherical functions (real parts, rows) with Plancherel weights:");
        for (row, w) in t.omega.iter().zip(&t.weights) {
            let vals: Vec<String> = row.iter().map(|z| format!("{:+.6}", z.re)).collect();
            println!("  [{}]  w = {:.6}", vals.join(", "), w);
        }
        println!("table residuals: {}", verdict(ok));
        ctx.write_json("spherical_table.json", &t.export())?;
    }
    let path = ctx.write_json("gelfand.json", &report)?;
    println!("wrote {}", path.display());
    Ok(ok)
}

// ---------------------------------------------------------------- delsarte

#[derive(Serialize)]
struct InstanceSummary {
    group: String,
    order: usize,
    k: Vec<usize>,
    u: GroupSubset,
    v: GroupSubset,
    gelfand: bool,
    num_classes: usize,
}

#[derive(Serialize)]
struct DualCertificate {
    dual_eq: Vec<f64>,
    dual_le: Vec<f64>,
    reduced_costs: Vec<f64>,
    primal_objective: f64,
    dual_objective: f64,
    report: CertificateReport,
}

#[derive(Serialize)]
struct OracleCheck {
    method: &'static str,
    value: Option<f64>,
    agrees: Option<bool>,
}

#[derive(Serialize)]
struct DelsarteReport {
    run: RunInfo,
    conventions: Conventions,
    instance: InstanceSummary,
    mode_used: Option<SolveMode>,
    value: Option<f64>,
    exact_value: Option<String>,
    classes: Vec<Vec<usize>>,
    extremal: Vec<f64>,
    extremal_exact: Option<Vec<String>>,
    generator_weights: Option<Vec<f64>>,
    spherical_coefficients: Option<Vec<f64>>,
    dual_certificate: Option<DualCertificate>,
    kernel_value: Option<f64>,
    checks: Option<delsarte::DelsarteChecks>,
    oracle: Option<OracleCheck>,
    feasibility: Option<delsarte::FeasibilityReport>,
    all_checks_passed: bool,
}

#[derive(Serialize)]
struct ExtremalRow {
    element: usize,
    class: usize,
    value: f64,
}

fn solve_mode(mode: ModeArg) -> SolveMode {
    match mode {
        ModeArg::Auto => SolveMode::Auto,
        ModeArg::Float => SolveMode::Float,
        ModeArg::Rational => SolveMode::Rational,
    }
}

pub fn delsarte(ctx: &Ctx, path: &Path) -> CmdResult {
    let file = io::load_instance(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let g = file.group.load(base)?;
    let k = g.subgroup(&file.k)?;
    let closure = if file.close { Closure::Close } else { Closure::Strict };
    let inst = delsarte::make_instance(&g, &k, &file.u.to_spec()?, &file.v.to_spec()?, closure)?;
    let tol = ctx.tol_or(ORACLE_TOL);
    let summary = InstanceSummary {
        group: g.name().to_string(),
        order: g.order(),
        k: k.elements().to_vec(),
        u: inst.u.clone(),
        v: inst.v.clone(),
        gelfand: inst.gelfand,
        num_classes: inst.partition.num_classes(),
    };
    let run = ctx.run_info("delsarte", vec![path.display().to_string()], tol);
    let classes = inst.partition.classes.clone();

    let (report, extremal) = if inst.gelfand {
        let sol = delsarte::solve_delsarte(&inst, solve_mode(ctx.mode), ctx.seed)?;
        let s = sol.table.real_basis().functions.len();
        let oracle = if s <= delsarte::BRUTE_FORCE_LIMIT {
            let v = delsarte::brute_force_delsarte(&inst, ctx.seed)?;
            OracleCheck {
                method: "vertex_enumeration",
                value: Some(v),
                agrees: Some((v - sol.value).abs() < tol),
            }
        } else {
            OracleCheck {
                method: "skipped_too_many_generators",
                value: None,
                agrees: None,
            }
        };
        let ok = sol.checks.all() && oracle.agrees != Some(false);
        let dc = &sol.dual_certificate;
        let report = DelsarteReport {
            run,
            conventions: ctx.conventions(),
            instance: summary,
            mode_used: Some(sol.mode),
            value: Some(sol.value),
            exact_value: sol.exact_value.as_ref().map(|v| v.to_string()),
            classes,
            extremal: sol.extremal.coeffs.clone(),
            extremal_exact: sol.extremal_exact.as_ref().map(|v| v.iter().map(|x| x.to_string()).collect()),
            generator_weights: Some(sol.weights.clone()),
            spherical_coefficients: Some(sol.coeffs.values.iter().map(|z| z.re).collect()),
            dual_certificate: Some(DualCertificate {
                dual_eq: dc.dual_eq.clone(),
                dual_le: dc.dual_le.clone(),
                reduced_costs: dc.reduced_costs.clone(),
                primal_objective: dc.objective_value,
                dual_objective: dc.dual_objective,
                report: sol.certificate.clone(),
            }),
            kernel_value: Some(sol.kernel_value),
            checks: Some(sol.checks.clone()),
            oracle: Some(oracle),
            feasibility: None,
            all_checks_passed: ok,
        };
        (report, sol.extremal)
    } else {
        // Optimization needs a commutative Hecke algebra; certify a witness instead.
        let witness = delsarte::feasible_autocorrelation(&inst, None)?;
        let feas = delsarte::check_feasibility(&inst, &witness.f)?;
        let ok = feas.feasible();
        let report = DelsarteReport {
            run,
            conventions: ctx.conventions(),
            instance: summary,
            mode_used: None,
            value: None,
            exact_value: None,
            classes,
            extremal: witness.f.coeffs.clone(),
            extremal_exact: None,
            generator_weights: None,
            spherical_coefficients: None,
            dual_certificate: None,
            kernel_value: None,
            checks: None,
            oracle: None,
            feasibility: Some(feas),
            all_checks_passed: ok,
        };
        (report, witness.f)
    };

    match (report.value, &report.exact_value) {
        (Some(v), Some(e)) => println!("constant = {e} ({v:.12})"),
        (Some(v), None) => println!("constant = {v:.12}"),
        _ => println!(
            "not a Gelfand pair: verification only, feasible witness with integral {:.12}",
            extremal.integral()
        ),
    }
    if let Some(kv) = report.kernel_value {
        println!("kernel-side value = {kv:.12}");
    }
    if let Some(o) = &report.oracle {
        if let Some(v) = o.value {
            println!("vertex-enumeration oracle = {v:.12}");
        }
    }
    println!("cross-checks: {}", verdict(report.all_checks_passed));

    let ok = report.all_checks_passed;
    let path = ctx.write_json("delsarte.json", &report)?;
    let expanded = extremal.expand();
    let rows: Vec<ExtremalRow> = (0..g.order())
        .map(|x| ExtremalRow {
            element: x,
            class: inst.partition.class_of[x],
            value: expanded.values[x],
        })
        .collect();
    ctx.write_csv("extremal.csv", &rows)?;
    let space = homspace::coset_space(&g, &k)?;
    if space.len() <= KERNEL_CSV_LIMIT {
        let kern = homspace::lift_j(&space, &expanded)?;
        ctx.write_text("extremal_kernel.csv", &homspace::kernel_to_csv(&kern))?;
    }
    println!("wrote {}", path.display());
    Ok(ok)
}

// ---------------------------------------------------------------- sphere-turan

#[derive(Serialize)]
struct BoundsRow {
    c: f64,
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    lower: f64,
    upper: f64,
    gap: f64,
    upper_b0: f64,
}

#[derive(Serialize)]
struct CapResult {
    c_input: String,
    c: f64,
    lower: f64,
    upper: f64,
    gap: f64,
    upper_b0: f64,
    lower_witness: Vec<f64>,
    upper_coeffs: Vec<f64>,
    tail_mass: f64,
    certificate_ok: bool,
    bracket_ok: bool,
    extrapolated: bool,
    upper_refined: Option<f64>,
    refinement_ok: Option<bool>,
    plot_file: String,
}

#[derive(Serialize)]
struct SphereReport {
    run: RunInfo,
    conventions: Conventions,
    d: usize,
    n: usize,
    m: usize,
    omega_d: f64,
    caps: Vec<CapResult>,
    monotone_in_c: bool,
    all_checks_passed: bool,
}

#[derive(Serialize)]
struct PlotRow {
    t: f64,
    lower_witness: f64,
    upper_lp: f64,
}

pub fn sphere_turan(ctx: &Ctx, d: usize, cs: &[String], n: usize, m: usize, refine: bool, samples: usize) -> CmdResult {
    let tol = ctx.tol_or(BRACKET_TOL);
    let mut caps = Vec::with_capacity(cs.len());
    let mut rows = Vec::with_capacity(cs.len());
    let mut omega_d = sphere::sphere_area(d);
    for (i, text) in cs.iter().enumerate() {
        let c = parse_angle(text)?;
        let b = sphere::solve_turan_sphere(&TuranSphereInstance::new(d, c, n, m)?)?;
        omega_d = b.omega_d;
        let refined = if refine {
            Some(sphere::solve_turan_sphere(&TuranSphereInstance::new(d, c, n, 2 * m)?)?)
        } else {
            None
        };
        let bracket_ok = b.lower <= b.upper + tol && b.upper <= b.omega_d + tol;
        let upper_fn = IsotropicCoeffs::new(d, b.upper_coeffs.clone())?;
        let plot: Vec<PlotRow> = b
            .lower_witness
            .plot_table(samples)
            .into_iter()
            .map(|(t, lw)| PlotRow {
                t,
                lower_witness: lw,
                upper_lp: upper_fn.evaluate(t),
            })
            .collect();
        let plot_file = format!("sphere_plot_{i}.csv");
        ctx.write_csv(&plot_file, &plot)?;
        println!(
            "d={d} c={c:.6} ({text}): lower {:.10}  upper {:.10}  gap {:.3e}{}",
            b.lower,
            b.upper,
            b.gap,
            if b.extrapolated { "  [d=1 extrapolated]" } else { "" }
        );
        rows.push(BoundsRow {
            c,
            d,
            n,
            m,
            lower: b.lower,
            upper: b.upper,
            gap: b.gap,
            upper_b0: b.upper_b0,
        });
        caps.push(CapResult {
            c_input: text.clone(),
            c,
            lower: b.lower,
            upper: b.upper,
            gap: b.gap,
            upper_b0: b.upper_b0,
            lower_witness: b.lower_witness.b.clone(),
            upper_coeffs: b.upper_coeffs.clone(),
            tail_mass: b.tail_mass,
            certificate_ok: b.certificate_ok,
            bracket_ok,
            extrapolated: b.extrapolated,
            upper_refined: refined.as_ref().map(|r| r.upper),
            refinement_ok: refined.as_ref().map(|r| r.upper <= b.upper + tol && r.certificate_ok),
            plot_file,
        });
    }
    let mut order: Vec<usize> = (0..caps.len()).collect();
    order.sort_by(|&a, &b| caps[a].c.total_cmp(&caps[b].c));
    let monotone_in_c = order.windows(2).all(|w| caps[w[1]].upper >= caps[w[0]].upper - tol);
    let all_checks_passed = monotone_in_c
        && caps
            .iter()
            .all(|c| c.certificate_ok && c.bracket_ok && c.refinement_ok != Some(false));
    let report = SphereReport {
        run: ctx.run_info("sphere-turan", cs.to_vec(), tol),
        conventions: ctx.conventions().with_sphere_area(omega_d),
        d,
        n,
        m,
        omega_d,
        caps,
        monotone_in_c,
        all_checks_passed,
    };
    ctx.write_csv("sphere_bounds.csv", &rows)?;
    let path = ctx.write_json("sphere_report.json", &report)?;
    println!("monotone in c: {}", verdict(monotone_in_c));
    println!("cross-checks: {}", verdict(all_checks_passed));
    println!("wrote {}", path.display());
    Ok(all_checks_passed)
}

// ---------------------------------------------------------------- conv-root

/// Either a function on a finite group (per element `f` or per double coset
/// `coeffs`) or Schoenberg coefficients of an isotropic kernel.
#[derive(Deserialize)]
#[serde(untagged)]
enum RootInput {
    Group {
        group: GroupRef,
        #[serde(rename = "K", default)]
        k: Vec<usize>,
        #[serde(default)]
        f: Option<Vec<f64>>,
        #[serde(default)]
        coeffs: Option<Vec<f64>>,
    },
    Sphere {
        d: usize,
        b: Vec<f64>,
    },
}

#[derive(Serialize)]
struct GroupRootReport {
    run: RunInfo,
    conventions: Conventions,
    group: String,
    k: Vec<usize>,
    classes: Vec<Vec<usize>>,
    root_per_class: Vec<f64>,
    root: Vec<f64>,
    clamped_coefficients: Vec<usize>,
    residual: f64,
    root_pd: bool,
    all_checks_passed: bool,
}

#[derive(Serialize)]
struct SphereRootReport {
    run: RunInfo,
    conventions: Conventions,
    d: usize,
    root: Vec<f64>,
    residual: f64,
    all_checks_passed: bool,
}

pub fn conv_root(ctx: &Ctx, path: &Path) -> CmdResult {
    let text = std::fs::read_to_string(path)?;
    let input: RootInput = serde_json::from_str(&text)?;
    let tol = ctx.tol_or(ROOT_TOL);
    let run = ctx.run_info("conv-root", vec![path.display().to_string()], tol);
    match input {
        RootInput::Group { group, k, f, coeffs } => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            let g = group.load(base)?;
            let sub = if k.is_empty() { g.trivial_subgroup() } else { g.subgroup(&k)? };
            let partition = gelfand::double_cosets(&g, &sub)?;
            if !partition.is_commutative() {
                return Err("conv-root needs a Gelfand pair".into());
            }
            let bf = match (f, coeffs) {
                (Some(f), None) => BiInvariantFunction::from_function(Arc::clone(&partition), &GroupFunction::new(f), 1e-12)?,
                (None, Some(c)) => BiInvariantFunction::new(Arc::clone(&partition), c)?,
                _ => return Err("give exactly one of \"f\" (per element) or \"coeffs\" (per double coset)".into()),
            };
            let table = SphericalTable::compute(Arc::clone(&partition), ctx.seed)?;
            let r = gelfand::convolution_root(&bf, &table)?;
            let root = r.root.expand();
            let root_pd = g.is_positive_definite(&root, None)?.verdict;
            let ok = r.residual < tol && root_pd;
            println!("root residual sup|g*g - f| = {:.3e}", r.residual);
            println!("root positive definite: {root_pd}");
            let report = GroupRootReport {
                run,
                conventions: ctx.conventions(),
                group: g.name().to_string(),
                k: sub.elements().to_vec(),
                classes: partition.classes.clone(),
                root_per_class: r.root.coeffs.clone(),
                root: root.values.clone(),
                clamped_coefficients: r.clamped,
                residual: r.residual,
                root_pd,
                all_checks_passed: ok,
            };
            let out = ctx.write_json("conv_root.json", &report)?;
            println!("cross-checks: {}", verdict(ok));
            println!("wrote {}", out.display());
            Ok(ok)
        }
        RootInput::Sphere { d, b } => {
            let a = IsotropicCoeffs::new(d, b)?;
            let scale = a.b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let root = sphere::sphere_convolution_root(&a, 1e-12 * scale)?;
            let back = sphere::isotropic_convolve(&root, &root)?;
            let residual = back.b.iter().zip(&a.b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let ok = residual < tol * scale;
            println!("root coefficient residual = {residual:.3e}");
            let report = SphereRootReport {
                run,
                conventions: ctx.conventions().with_sphere_area(sphere::sphere_area(d)),
                d,
                root: root.b,
                residual,
                all_checks_passed: ok,
            };
            let out = ctx.write_json("conv_root.json", &report)?;
            println!("cross-checks: {}", verdict(ok));
            println!("wrote {}", out.display());
            Ok(ok)
        }
    }
}
