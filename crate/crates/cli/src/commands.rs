use serde::Serialize;
use subhardy::boundary::{
    d_eucl_torus, HalfSpace, Metric, Multiplicity, NearestPointResult, Torus, AXIS_SAMPLES,
};
use subhardy::group::HeisenbergPoint;
use subhardy::horizontal::{beta_constant, cc_sign_scan, gauge_sign_scan, torus_certificate, GridSpec, SignScan};
use subhardy::lab::{
    concavity_sampling, cube_concavity_sampling, epsilon_sweep, h_concavity_counterexample_search, log_log_slope,
    uncertainty_check, QuadratureSpec, QuotientDomain, TestFunctionSpec,
};
use subhardy::{Error, StepTwo};

use crate::config::{Check, DomainKind, Mode, RunConfig};
use crate::output::{coords, Outcome, Table};
use crate::Failure;

#[derive(Serialize)]
struct DistRecord {
    distance: f64,
    nearest_points: Vec<HeisenbergPoint<f64>>,
    multiplicity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    face: Option<usize>,
}

fn multiplicity_tag(m: Multiplicity) -> &'static str {
    match m {
        Multiplicity::Unique => "unique",
        Multiplicity::Circle => "circle",
        Multiplicity::TwoBranch => "two_branch",
    }
}

fn from_nearest(r: NearestPointResult<f64>) -> DistRecord {
    DistRecord {
        distance: r.distance,
        nearest_points: r.points,
        multiplicity: multiplicity_tag(r.multiplicity).into(),
        face: None,
    }
}

fn halfspace_dist(h: &HalfSpace<f64>, xi: &HeisenbergPoint<f64>, metric: Metric) -> Result<DistRecord, Failure> {
    match h.nearest_points(xi, metric) {
        Ok(r) => Ok(from_nearest(r)),
        Err(Error::AxisMinimizerUndetermined { distance }) => Ok(DistRecord {
            distance,
            nearest_points: Vec::new(),
            multiplicity: "undetermined".into(),
            face: None,
        }),
        Err(e) => Err(e.into()),
    }
}

fn vertical_foot(normal: &[f64], offset: f64, xi: &HeisenbergPoint<f64>) -> Result<DistRecord, Failure> {
    let h = xi.horizontal();
    let nn: f64 = normal.iter().map(|v| v * v).sum();
    let level: f64 = normal.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>() - offset;
    let foot: Vec<f64> = h.iter().zip(normal).map(|(v, a)| v - level / nn * a).collect();
    let n = xi.n();
    Ok(DistRecord {
        distance: level / nn.sqrt(),
        nearest_points: vec![HeisenbergPoint::new(foot[..n].to_vec(), foot[n..].to_vec(), xi.t())?],
        multiplicity: "unique".into(),
        face: None,
    })
}

fn torus_dist(cfg: &RunConfig, xi: &HeisenbergPoint<f64>) -> Result<DistRecord, Failure> {
    if cfg.metric != Metric::Euclidean {
        return Err(Failure::Unsupported(format!(
            "torus distances are implemented for the euclidean metric only, got {}",
            cfg.metric
        )));
    }
    let torus = Torus::new(cfg.domain.big_r, cfg.domain.rho, cfg.n)?;
    let c = xi.cyl();
    let distance = d_eucl_torus(&torus, &c)?;
    let omega = c
        .omega
        .clone()
        .ok_or_else(|| Failure::Config("point lies on the t-axis, outside the torus".into()))?;
    let q = torus.core_distance(c.r, c.t);
    let (nearest_points, multiplicity) = if q == 0.0 {
        let pts = (0..AXIS_SAMPLES)
            .map(|k| torus.boundary_point(std::f64::consts::TAU * k as f64 / AXIS_SAMPLES as f64, &omega))
            .collect::<subhardy::Result<Vec<_>>>()?;
        (pts, "circle")
    } else {
        let theta = c.t.atan2(c.r - torus.big_r);
        (vec![torus.boundary_point(theta, &omega)?], "unique")
    };
    Ok(DistRecord {
        distance,
        nearest_points,
        multiplicity: multiplicity.into(),
        face: None,
    })
}

pub fn dist(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = cfg
        .point
        .as_ref()
        .ok_or_else(|| Failure::Config("dist needs --point".into()))?;
    let xi = spec.to_point(cfg.n)?;
    let rec = match cfg.domain.kind {
        DomainKind::Halfspace => halfspace_dist(&HalfSpace::pi0(cfg.n), &xi, cfg.metric)?,
        DomainKind::Torus => torus_dist(cfg, &xi)?,
        DomainKind::Polytope | DomainKind::Cube => {
            let poly = cfg.domain.polytope()?;
            let best = poly.distance_with_face(&xi, cfg.metric)?;
            let mut rec = match &poly.faces[best.face] {
                HalfSpace::Vertical { normal, offset } => vertical_foot(normal, *offset, &xi)?,
                face => halfspace_dist(face, &xi, cfg.metric)?,
            };
            rec.distance = best.distance;
            rec.face = Some(best.face);
            rec
        }
    };
    let mut table = Table::new(&["distance", "multiplicity", "index", "point"]);
    if rec.nearest_points.is_empty() {
        table.push(vec![rec.distance.into(), rec.multiplicity.as_str().into(), "".into(), "".into()]);
    }
    for (k, p) in rec.nearest_points.iter().enumerate() {
        let mut flat = p.horizontal();
        flat.push(p.t());
        table.push(vec![rec.distance.into(), rec.multiplicity.as_str().into(), k.into(), coords(&flat)]);
    }
    Outcome::new(&rec, table)
}

pub fn beta(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let rep = beta_constant(cfg.p, cfg.n)?;
    #[derive(Serialize)]
    struct Rec {
        #[serde(flatten)]
        report: subhardy::horizontal::BetaReport,
        case_label: &'static str,
    }
    let mut table = Table::new(&["p", "n", "beta", "case", "threshold", "p0"]);
    table.push(vec![
        rep.p.into(),
        rep.n.into(),
        rep.beta.into(),
        rep.case.label().into(),
        rep.threshold.into(),
        rep.p0.into(),
    ]);
    Outcome::new(
        &Rec {
            case_label: rep.case.label(),
            report: rep,
        },
        table,
    )
}

const VERIFY_HEADER: [&str; 10] = [
    "domain", "metric", "p", "n", "pass", "worst", "worst_r", "worst_t", "points", "reasons",
];

pub fn verify(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut table = Table::new(&VERIFY_HEADER);
    match cfg.domain.kind {
        DomainKind::Torus => {
            let cert = torus_certificate(cfg.p, cfg.n, cfg.domain.big_r, cfg.domain.rho, cfg.grid)?;
            table.push(vec![
                "torus".into(),
                "euclidean".into(),
                cert.p.into(),
                cert.n.into(),
                cert.pass.into(),
                cert.worst_w.into(),
                cert.worst_at.0.into(),
                cert.worst_at.1.into(),
                cert.points.into(),
                cert.reasons.join("; ").into(),
            ]);
            let fail = (!cert.pass).then(|| Failure::Expectation(cert.reasons.join("; ")));
            Ok(Outcome::new(&cert, table)?.fail_with(fail))
        }
        DomainKind::Halfspace => {
            let grid = GridSpec {
                r_min: cfg.r_min,
                r_max: cfg.r_max,
                t_min: cfg.t_min,
                t_max: cfg.t_max,
                size: cfg.grid,
            };
            if grid.r_min <= 0.0 || grid.t_min <= 0.0 {
                return Err(Failure::Config("the scan grid must stay inside r > 0, t > 0".into()));
            }
            let scan: SignScan = match cfg.metric {
                Metric::Gauge => gauge_sign_scan(grid, cfg.n, cfg.p)?,
                Metric::Cc if cfg.p == 2.0 => cc_sign_scan(grid, cfg.n)?,
                Metric::Cc => {
                    return Err(Failure::Unsupported(
                        "the cc certificate covers the sub-Laplacian (p = 2) only".into(),
                    ))
                }
                Metric::Euclidean => {
                    return Err(Failure::Unsupported(
                        "no half-space certificate for the euclidean metric".into(),
                    ))
                }
            };
            let reasons = if scan.pass {
                String::new()
            } else {
                format!("{} grid values above 0, max {} at {:?}", scan.positive, scan.max_value, scan.argmax)
            };
            table.push(vec![
                "halfspace".into(),
                cfg.metric.to_string().into(),
                cfg.p.into(),
                cfg.n.into(),
                scan.pass.into(),
                scan.max_value.into(),
                scan.argmax.0.into(),
                scan.argmax.1.into(),
                scan.points.into(),
                reasons.clone().into(),
            ]);
            let fail = (!scan.pass).then_some(Failure::Expectation(reasons));
            Ok(Outcome::new(&scan, table)?.fail_with(fail))
        }
        other => Err(Failure::Unsupported(format!("verify has no certificate for {other:?} domains"))),
    }
}

fn quotient_domain(cfg: &RunConfig) -> Result<QuotientDomain, Failure> {
    match cfg.domain.kind {
        DomainKind::Halfspace => Ok(QuotientDomain::HalfSpace {
            n: cfg.n,
            r_min: cfg.r_min,
            r_max: cfg.r_max,
            t_max: cfg.t_max,
        }),
        DomainKind::Torus => Ok(QuotientDomain::torus(cfg.n, cfg.domain.big_r, cfg.domain.rho)),
        other => Err(Failure::Unsupported(format!("no quotient quadrature for {other:?} domains"))),
    }
}

pub fn quotient(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let domain = quotient_domain(cfg)?;
    let spec = TestFunctionSpec {
        cutoff_inner: cfg.q1,
        cutoff_outer: cfg.q2,
        ..TestFunctionSpec::new(cfg.eps_list[0])
    };
    let quad = QuadratureSpec {
        size: cfg.grid,
        max_error: cfg.max_error,
    };
    if cfg.check == Some(Check::Uncertainty) {
        let reports = cfg
            .eps_list
            .iter()
            .map(|&eps| uncertainty_check(&domain, cfg.metric, &TestFunctionSpec { exponent_eps: eps, ..spec }, &quad))
            .collect::<subhardy::Result<Vec<_>>>()?;
        let mut table = Table::new(&["eps", "lhs", "rhs", "ratio", "est_error", "converged"]);
        for r in &reports {
            table.push(vec![
                r.eps.into(),
                r.lhs.into(),
                r.rhs.into(),
                r.ratio.into(),
                r.est_error.into(),
                r.converged.into(),
            ]);
        }
        let fail = if let Some(r) = reports.iter().find(|r| !r.converged) {
            Some(Failure::NonConvergence(format!("eps {}: estimated error {}", r.eps, r.est_error)))
        } else { reports.iter().find(|r| r.ratio < 1.0).map(|r| Failure::Expectation(format!("eps {}: uncertainty ratio {} < 1", r.eps, r.ratio))) };
        return Ok(Outcome::new(&reports, table)?.fail_with(fail));
    }
    let sweep = epsilon_sweep(&domain, cfg.metric, cfg.p, &cfg.eps_list, &spec, &quad, 0.05)?;
    let mut table = Table::new(&[
        "eps",
        "numerator",
        "denominator",
        "quotient",
        "est_error",
        "target",
        "converged",
    ]);
    for r in &sweep.reports {
        table.push(vec![
            r.eps.into(),
            r.numerator.into(),
            r.denominator.into(),
            r.quotient.into(),
            r.est_error.into(),
            r.target.into(),
            r.converged.into(),
        ]);
    }
    let fail = if let Some(r) = sweep.reports.iter().find(|r| !r.converged) {
        Some(Failure::NonConvergence(format!(
            "eps {}: estimated error {} exceeds {}",
            r.eps, r.est_error, cfg.max_error
        )))
    } else if !sweep.above_floor {
        Some(Failure::Expectation("a quotient fell below the Hardy constant".into()))
    } else {
        None
    };
    Ok(Outcome::new(&sweep, table)?.fail_with(fail))
}

pub fn hconcavity(cfg: &RunConfig) -> Result<Outcome, Failure> {
    match cfg.mode {
        Mode::Cube => {
            let summary = if cfg.domain.kind == DomainKind::Polytope {
                let poly = cfg.domain.polytope()?;
                let group = StepTwo::heisenberg(poly.n());
                let dist = |g: &subhardy::Element| -> subhardy::Result<Option<f64>> {
                    let p = group.to_heisenberg(g)?;
                    if !poly.contains(&p)? {
                        return Ok(None);
                    }
                    poly.distance(&p, Metric::Euclidean).map(Some)
                };
                concavity_sampling(&group, dist, &poly.bounding_box, cfg.v_scale, cfg.samples, cfg.seed)?
            } else {
                if cfg.n != 1 {
                    return Err(Failure::Unsupported("the built-in cube lives in n = 1; pass a polytope".into()));
                }
                cube_concavity_sampling(cfg.samples, cfg.seed, cfg.v_scale)?
            };
            let mut table = Table::new(&["seed", "samples", "evaluated", "skipped", "violations", "worst_margin"]);
            table.push(vec![
                summary.seed.into(),
                summary.samples.into(),
                summary.evaluated.into(),
                summary.skipped.into(),
                summary.violations.into(),
                summary.worst_margin.into(),
            ]);
            let fail = (summary.violations > 0)
                .then(|| Failure::Expectation(format!("{} violations on a convex domain", summary.violations)));
            Ok(Outcome::new(&summary, table)?.fail_with(fail))
        }
        Mode::Counterexample => {
            let reports = cfg
                .t_scale
                .iter()
                .map(|&t| h_concavity_counterexample_search(t))
                .collect::<subhardy::Result<Vec<_>>>()?;
            let margins: Vec<f64> = reports.iter().map(|r| r.best.margin).collect();
            let slope = if reports.len() >= 2 && margins.iter().all(|m| *m > 0.0) {
                Some(log_log_slope(&cfg.t_scale, &margins)?)
            } else {
                None
            };
            let mut table = Table::new(&["t_scale", "found", "margin", "lhs", "rhs", "lambda", "xi", "xi_prime"]);
            for r in &reports {
                table.push(vec![
                    r.t_scale.into(),
                    r.found.into(),
                    r.best.margin.into(),
                    r.best.lhs.into(),
                    r.best.rhs.into(),
                    r.best.lambda.into(),
                    coords(&r.best.xi),
                    coords(&r.best.xi_prime),
                ]);
            }
            #[derive(Serialize)]
            struct Rec<'a> {
                reports: &'a [subhardy::lab::CounterexampleReport],
                margin_exponent: Option<f64>,
            }
            let fail = reports
                .iter()
                .find(|r| !r.found)
                .map(|r| Failure::Expectation(format!("no violation at t_scale {}", r.t_scale)));
            Ok(Outcome::new(
                &Rec {
                    reports: &reports,
                    margin_exponent: slope,
                },
                table,
            )?
            .fail_with(fail))
        }
    }
}
