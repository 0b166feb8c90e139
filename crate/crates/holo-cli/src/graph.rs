use holo_graph::{assemble_integrand, GraphAssignment};
use holo_heat::PropagatorKernel;
use holo_integrator::{graph_integral, invariance_suite, GraphIntegralResult};

use crate::config::GraphIntBlock;
use crate::output::{f, Table};
use crate::{to_value, Body, CliError, Context};

fn sweep_rows(table: &mut Table, run: usize, r: &GraphIntegralResult) {
    for e in &r.estimates {
        table.push(vec![run.to_string(), f(e.eps), f(e.value.re), f(e.value.im), f(e.stat_err), f(e.wall_time)]);
    }
}

pub(crate) fn run(block: &GraphIntBlock, ctx: &Context) -> Result<(Body, Table), CliError> {
    let lattice = block.lattice.build()?;
    let n = lattice.n();
    let graph = block.graph.build();
    let assignment = match &block.densities {
        Some(d) => GraphAssignment::new(n, graph, d.clone()),
        None => GraphAssignment::trivial(n, graph),
    };
    if let Some(diag) = assignment.validate() {
        return Err(CliError::Config(format!("graph assignment: {diag:?}")));
    }
    if block.fake_distances.is_empty() {
        return Err(CliError::Config("graph-int needs at least one fake distance".into()));
    }
    for fd in &block.fake_distances {
        fd.validate(&lattice)?;
    }
    block.schedule.validate()?;
    let kernel = PropagatorKernel::new(lattice, block.propagator.build())?;
    let strategy = block.strategy.build(ctx.seed);
    let mut table = Table::new(&["run", "eps", "re", "im", "stat_err", "wall_time"]);
    let mut notes = Vec::new();
    let mut flags = Vec::new();
    let results = if block.fake_distances.len() >= 2 {
        let rep = invariance_suite(&assignment, &kernel, &block.fake_distances, &block.schedule, &strategy)?;
        for (k, r) in rep.runs.iter().enumerate() {
            sweep_rows(&mut table, k, r);
            notes.extend(r.notes.iter().map(|s| format!("run {k}: {s}")));
        }
        for c in rep.fake_distance.iter().chain(rep.pinning.iter()).chain([&rep.permutation]) {
            if !c.pass {
                flags.push(format!("{}: discrepancy {:e} exceeds {:e}", c.label, c.discrepancy, c.tolerance));
            }
        }
        for (k, r) in rep.runs.iter().enumerate() {
            if r.flagged {
                flags.push(format!("run {k} flagged"));
            }
        }
        if rep.flagged && flags.is_empty() {
            flags.push("invariance suite flagged".into());
        }
        to_value(&rep)?
    } else {
        let itg = assemble_integrand(&assignment, &kernel)?;
        let r = graph_integral(&itg, &block.fake_distances[0], &block.schedule, &strategy)?;
        sweep_rows(&mut table, 0, &r);
        notes.extend(r.notes.iter().cloned());
        if r.flagged {
            flags.push(format!("sweep flagged: {}", r.notes.join("; ")));
        }
        to_value(&r)?
    };
    Ok((Body { results, flags, notes }, table))
}
