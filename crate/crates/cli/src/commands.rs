//! Subcommand implementations: parse a document, solve, fill a result.

use credal_ot::choquet::default_step;
use credal_ot::ot_classical::{
    solve_kantorovich_with, solve_monge_discrete_with_tolerance, PUSHFORWARD_TOLERANCE,
};
use credal_ot::{
    choquet_bounded_coherent, choquet_riemann, choquet_sorted, gaussian_monge_map, gbc_condition,
    geometric_condition, lower_wasserstein_p, monge_map_1d, solve_lpm, solve_rlpk, wasserstein_p,
    AtomFunction, DiscreteDistribution, EnvelopeKind, EpsContamination, Event, FiniteSpace,
    GaussianPair, LowerPlan, PivotRule, TransportPlan,
};
use log::{debug, info};
use nalgebra::DMatrix;
use serde::de::DeserializeOwned;

use crate::args::CommonArgs;
use crate::error::{CliError, CliResult, ErrorKind};
use crate::output::{Curve, Provenance, ResultDocument};
use crate::schema::{
    resolve_epsilons, square_matrix, ChoquetDoc, ChoquetMethod, ConditionDoc, ConditionRule,
    EnvelopeDoc, GaussianDoc, MatrixDoc, Monge1dDoc, PairDoc, WassersteinDoc,
};

/// Points on `[-3, 3]` for plotting one-dimensional Gaussian maps.
const GAUSS_PLOT_POINTS: usize = 61;

pub struct Context<'a> {
    pub args: &'a CommonArgs,
    pub input: &'a [u8],
}

impl Context<'_> {
    fn parse<T: DeserializeOwned>(&self) -> CliResult<T> {
        Ok(serde_json::from_slice(self.input)?)
    }

    fn result(&self, command: &str, value: f64) -> ResultDocument {
        ResultDocument::new(command, value, Provenance::new(self.input, self.args.seed))
    }
}

fn plan_doc(plan: &TransportPlan) -> MatrixDoc {
    MatrixDoc::from_flat(plan.rows(), plan.cols(), plan.matrix())
}

fn marginal_residual(plan: &TransportPlan) -> f64 {
    let rows = plan.row_sums();
    let cols = plan.col_sums();
    rows.iter()
        .zip(plan.source().mass())
        .chain(cols.iter().zip(plan.target().mass()))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn pair_bases(doc: &PairDoc) -> CliResult<(DiscreteDistribution, DiscreteDistribution)> {
    Ok((doc.p.base()?, doc.q.base()?))
}

pub fn kantorovich(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: PairDoc = ctx.parse()?;
    let (p, q) = pair_bases(&doc)?;
    let c = doc.cost.to_cost("cost")?;
    info!("kantorovich: {}x{} instance", p.len(), q.len());
    let sol = solve_kantorovich_with(&p, &q, &c, PivotRule::BlockSearch)?;
    debug!("network simplex finished after {} pivots", sol.pivots);
    let mut out = ctx.result("kantorovich", sol.value);
    out.diag("pivots", sol.pivots as u64)
        .diag("marginal_residual", marginal_residual(&sol.plan))
        .diag("solver", "network-simplex");
    out.plan = Some(plan_doc(&sol.plan));
    Ok(out)
}

fn no_map(p: &DiscreteDistribution, q: &DiscreteDistribution) -> CliError {
    CliError::new(
        ErrorKind::Domain,
        format!(
            "no map pushes the {}-atom source onto the {}-atom target",
            p.len(),
            q.len()
        ),
    )
}

pub fn monge(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: PairDoc = ctx.parse()?;
    let (p, q) = pair_bases(&doc)?;
    let c = doc.cost.to_cost("cost")?;
    let tol = ctx.args.tolerance.unwrap_or(PUSHFORWARD_TOLERANCE);
    let (map, value) = solve_monge_discrete_with_tolerance(&p, &q, &c, tol)?
        .ok_or_else(|| no_map(&p, &q))?;
    let mut out = ctx.result("monge", value);
    out.diag("pushforward_tolerance", tol);
    out.plan = Some(plan_doc(&TransportPlan::deterministic(&p, &map)?));
    out.map = Some(map.assignment().to_vec());
    Ok(out)
}

fn lower_pair(ctx: &Context, doc: &PairDoc) -> CliResult<(EpsContamination, EpsContamination)> {
    let (ep, eq) = resolve_epsilons(ctx.args.epsilon, doc.epsilon, &doc.p, &doc.q);
    let (p, q) = pair_bases(doc)?;
    Ok((EpsContamination::new(p, ep)?, EpsContamination::new(q, eq)?))
}

pub fn lower_kantorovich(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: PairDoc = ctx.parse()?;
    let (cp, cq) = lower_pair(ctx, &doc)?;
    let c = doc.cost.to_cost("cost")?;
    let (plan, value) = solve_rlpk(&cp, &cq, &c)?;
    let classical = plan.base().cost(&c)?;
    let mut out = ctx.result("lower-kantorovich", value);
    out.diag("epsilon", cp.epsilon())
        .diag("classical_value", classical)
        .diag("marginal_residual", marginal_residual(plan.base()));
    out.plan = Some(plan_doc(plan.base()));
    Ok(out)
}

pub fn lower_monge(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: PairDoc = ctx.parse()?;
    let (cp, cq) = lower_pair(ctx, &doc)?;
    let c = doc.cost.to_cost("cost")?;
    let (map, value) = solve_lpm(&cp, &cq, &c)?.ok_or_else(|| no_map(cp.base(), cq.base()))?;
    let mut out = ctx.result("lower-monge", value);
    out.diag("epsilon", cp.epsilon())
        .diag("classical_value", c.map_cost(cp.base(), &map)?);
    out.plan = Some(plan_doc(&TransportPlan::deterministic(cp.base(), &map)?));
    out.map = Some(map.assignment().to_vec());
    Ok(out)
}

pub fn choquet(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: ChoquetDoc = ctx.parse()?;
    let c = doc.contamination.to_core(ctx.args.epsilon)?;
    let f = AtomFunction::new(doc.values.clone())?;
    let kind = match doc.envelope.unwrap_or_default() {
        EnvelopeDoc::Incoherent => EnvelopeKind::Incoherent,
        EnvelopeDoc::Coherent => EnvelopeKind::Coherent,
    };
    let method = doc.method.unwrap_or_default();
    let mut out;
    match method {
        ChoquetMethod::Sorted => {
            out = ctx.result("choquet", choquet_sorted(&f, &c.envelope(kind))?);
            out.diag("method", "sorted");
        }
        ChoquetMethod::Riemann => {
            let step = doc.step.unwrap_or_else(|| default_step(&f));
            out = ctx.result("choquet", choquet_riemann(&f, &c.envelope(kind), step)?);
            out.diag("method", "riemann").diag("step", step);
        }
        ChoquetMethod::CoherentBound => {
            out = ctx.result("choquet", choquet_bounded_coherent(&f, &c)?);
            out.diag("method", "coherent-bound");
        }
    }
    let envelope = match kind {
        EnvelopeKind::Incoherent => "incoherent",
        EnvelopeKind::Coherent => "coherent",
    };
    if method != ChoquetMethod::CoherentBound {
        out.diag("envelope", envelope);
    }
    out.diag("epsilon", c.epsilon());
    Ok(out)
}

pub fn monge1d(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: Monge1dDoc = ctx.parse()?;
    let p = doc.source.to_core()?;
    let q = doc.target.to_core()?;
    let xs = doc.grid.points()?;
    let ts = xs
        .iter()
        .map(|&x| monge_map_1d(&p, &q, x))
        .collect::<credal_ot::Result<Vec<f64>>>()?;
    let pexp = ctx.args.p_exponent.unwrap_or(1.0);
    if !(pexp >= 1.0) {
        return Err(CliError::input(format!("cost exponent must be at least 1, got {pexp}")));
    }
    // Source mass of the cell around each grid point, for a cost estimate.
    let edges: Vec<f64> = std::iter::once(xs[0])
        .chain(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])))
        .chain(std::iter::once(xs[xs.len() - 1]))
        .collect();
    let weights: Vec<f64> = edges.windows(2).map(|w| p.cdf(w[1]) - p.cdf(w[0])).collect();
    let covered: f64 = weights.iter().sum();
    let value = if covered > 0.0 {
        xs.iter()
            .zip(&ts)
            .zip(&weights)
            .map(|((x, t), w)| w * (x - t).abs().powf(pexp))
            .sum::<f64>()
            / covered
    } else {
        0.0
    };
    let mut out = ctx.result("monge1d", value);
    out.diag("p_exponent", pexp).diag("grid_source_mass", covered);
    out.curve = Some(Curve { x: xs, t: ts });
    Ok(out)
}

pub fn gauss_map(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: GaussianDoc = ctx.parse()?;
    let d = doc.dim;
    if d == 0 {
        return Err(CliError::input("dim must be positive"));
    }
    let sp = square_matrix(&doc.sigma_p, d, "sigma_p")?;
    let sq = square_matrix(&doc.sigma_q, d, "sigma_q")?;
    let a = match &doc.a {
        Some(a) => square_matrix(a, d, "a")?,
        None => DMatrix::identity(d, d),
    };
    let t = gaussian_monge_map(&GaussianPair::new(sp.clone(), sq.clone(), a)?)?;
    let resid = (&t * &sp * t.transpose() - &sq).norm();
    let shift = &t - DMatrix::identity(d, d);
    let value = 0.5 * (&shift * &sp * shift.transpose()).trace();
    let mut out = ctx.result("gauss-map", value);
    out.diag("pushforward_residual", resid);
    out.matrix = Some((0..d).map(|i| t.row(i).iter().copied().collect()).collect());
    if d == 1 {
        let slope = t[(0, 0)];
        let x: Vec<f64> = (0..GAUSS_PLOT_POINTS)
            .map(|k| -3.0 + 6.0 * k as f64 / (GAUSS_PLOT_POINTS - 1) as f64)
            .collect();
        let tx = x.iter().map(|x| slope * x).collect();
        out.curve = Some(Curve { x, t: tx });
        out.diag("slope", slope);
    }
    Ok(out)
}

pub fn condition(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: ConditionDoc = ctx.parse()?;
    let flat = doc.plan.flat("plan")?;
    let (n, m) = (doc.plan.rows, doc.plan.cols);
    let rows: Vec<f64> = (0..n).map(|i| flat[i * m..(i + 1) * m].iter().sum()).collect();
    let cols: Vec<f64> = (0..m).map(|j| (0..n).map(|i| flat[i * m + j]).sum()).collect();
    let p = DiscreteDistribution::from_weights(FiniteSpace::indexed("x", n)?, rows)?;
    let q = DiscreteDistribution::from_weights(FiniteSpace::indexed("y", m)?, cols)?;
    let eps = ctx.args.epsilon.or(doc.epsilon).unwrap_or(0.0);
    let joint = LowerPlan::new(TransportPlan::new(flat, p, q)?, eps)?;
    let a = Event::from_indices(doc.source_event.iter().copied());
    let b = Event::from_indices(doc.target_event.iter().copied());
    a.validate(n)?;
    b.validate(m)?;
    let rule = doc.rule.unwrap_or_default();
    let value = match rule {
        ConditionRule::Geometric => geometric_condition(&joint, &a, &b)?,
        ConditionRule::Gbc => gbc_condition(&joint, &a, &b)?,
    };
    let mut out = ctx.result("condition", value);
    out.diag("epsilon", eps).diag(
        "rule",
        match rule {
            ConditionRule::Geometric => "geometric",
            ConditionRule::Gbc => "gbc",
        },
    );
    if let Ok(g) = geometric_condition(&joint, &a, &b) {
        out.diag("geometric", g);
    }
    if let Ok(g) = gbc_condition(&joint, &a, &b) {
        out.diag("gbc", g);
    }
    Ok(out)
}

pub fn wasserstein(ctx: &Context) -> CliResult<ResultDocument> {
    let doc: WassersteinDoc = ctx.parse()?;
    let p = doc.p.base()?;
    let q = doc.q.base()?;
    let d = doc.distance.to_cost("distance")?;
    let pexp = ctx.args.p_exponent.unwrap_or(1.0);
    let lower = ctx.args.epsilon.is_some()
        || doc.epsilon.is_some()
        || doc.p.epsilon().is_some()
        || doc.q.epsilon().is_some();
    let mut out;
    if lower {
        let (ep, eq) = resolve_epsilons(ctx.args.epsilon, doc.epsilon, &doc.p, &doc.q);
        let cp = EpsContamination::new(p, ep)?;
        let cq = EpsContamination::new(q, eq)?;
        out = ctx.result("wasserstein", lower_wasserstein_p(&cp, &cq, &d, pexp)?);
        out.diag("epsilon", ep).diag("lower", true);
    } else {
        out = ctx.result("wasserstein", wasserstein_p(&p, &q, &d, pexp)?);
        out.diag("lower", false);
    }
    out.diag("p_exponent", pexp);
    Ok(out)
}
