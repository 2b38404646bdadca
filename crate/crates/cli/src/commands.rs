use std::fmt::Write as _;
use std::path::Path;

use graphasm::gds::{embed_gas, is_locally_deterministic, unique_result_oracle, Gds, LdVerdict, OracleOutcome};
use graphasm::graph::{language, reachable_set, Bounds, Strategy};
use graphasm::mis::{compose_then_measure, MisError, SurfaceCostReport};
use graphasm::rng;
use graphasm::sim::{
    adversarial_blockage_search, compile_3d, compile_planar, compile_topological, simulation_check,
    CompiledSimulation, ProcessorSystem, SimError, Trace,
};
use graphasm::tam::{
    is_locally_deterministic_tam, render_ascii, render_svg, run_assembly, terminal_assemblies, TamLdVerdict,
};

use crate::scenario::{load, Scenario};
use crate::{CliError, Opts, Target};

const RUN_SEEDS: u64 = 0x5eed;

fn write(o: &Opts, name: &str, body: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(&o.out).map_err(|e| CliError::Io(format!("{}: {e}", o.out.display())))?;
    let path = o.out.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn sim_error(e: SimError) -> CliError {
    match e {
        SimError::NotInClassC { .. } => CliError::NotInClassC(e.to_string()),
        SimError::BudgetExhausted(_) | SimError::PortBound { .. } => CliError::Bound(e.to_string()),
        _ => CliError::Parse(e.to_string()),
    }
}

fn mis_error(e: MisError) -> CliError {
    match e {
        MisError::DuplicateIds(_) | MisError::IdCount { .. } => CliError::Ids(e.to_string()),
        MisError::Unfinished(_) | MisError::NeighborhoodTooLarge { .. } => CliError::Bound(e.to_string()),
        MisError::SeedDependent(_) | MisError::EmptyAssembly => CliError::Violation(e.to_string()),
        MisError::Sim(e) => sim_error(e),
    }
}

fn unsupported(cmd: &str, s: &Scenario) -> CliError {
    CliError::Parse(format!("{cmd} does not take {:?} scenarios", s.kind()).to_lowercase())
}

fn bounds(o: &Opts) -> Bounds {
    Bounds {
        max_depth: o.depth,
        max_states: o.max_states,
        strategy: Strategy::Bfs,
    }
}

pub fn explore(path: &Path, o: &Opts) -> Result<String, CliError> {
    let s = load(path, o.kind)?;
    let mut summary = String::new();
    let complete = match &s {
        Scenario::Gas(sys) => {
            let ex = reachable_set(sys, bounds(o));
            let mut out = String::new();
            for (i, g) in ex.states.iter().enumerate() {
                writeln!(out, "state={i} depth={} edges={}", ex.depth[i], g.edge_count()).unwrap();
                out.push_str(&g.dump());
            }
            write(o, "reachable.txt", &out)?;
            let lang = language(sys, bounds(o));
            let mut out = String::new();
            for (i, g) in lang.members.iter().enumerate() {
                writeln!(out, "member={i} vertices={}", g.vertex_count()).unwrap();
                out.push_str(&g.dump());
            }
            write(o, "language.txt", &out)?;
            writeln!(
                summary,
                "kind=gas states={} language={} complete={}",
                ex.states.len(),
                lang.members.len(),
                lang.complete
            )
            .unwrap();
            lang.complete
        }
        Scenario::Gds(g) => oracle(g, o, &mut summary)?,
        Scenario::Tam(sys) => {
            let t = terminal_assemblies(sys, o.max_states);
            writeln!(
                summary,
                "kind=tam terminals={} unique_terminal={} states={} complete={}",
                t.assemblies.len(),
                t.complete && t.assemblies.len() == 1,
                t.states,
                t.complete
            )
            .unwrap();
            let mut out = summary.clone();
            for (i, a) in t.assemblies.iter().enumerate() {
                writeln!(out, "terminal={i} tiles={}", a.len()).unwrap();
                out.push_str(&sys.dump(a));
            }
            write(o, "terminal.txt", &out)?;
            t.complete
        }
        _ => return Err(unsupported("explore", &s)),
    };
    if !complete {
        return Err(CliError::Bound(format!("exploration cut by bounds\n{summary}")));
    }
    Ok(summary)
}

fn oracle(g: &Gds, o: &Opts, summary: &mut String) -> Result<bool, CliError> {
    let mut out = String::new();
    let complete = match unique_result_oracle(g, o.depth, o.max_states) {
        OracleOutcome::Unique { result, states } => {
            writeln!(summary, "kind=gds unique_result=true states={states}").unwrap();
            out.push_str(summary);
            out.push_str(&result.dump());
            true
        }
        OracleOutcome::NotUnique { first, second, results } => {
            writeln!(summary, "kind=gds unique_result=false results={results}").unwrap();
            out.push_str(summary);
            writeln!(out, "result=first").unwrap();
            out.push_str(&first.dump());
            writeln!(out, "result=second").unwrap();
            out.push_str(&second.dump());
            true
        }
        OracleOutcome::Inconclusive { states } => {
            writeln!(summary, "kind=gds unique_result=inconclusive states={states}").unwrap();
            out.push_str(summary);
            false
        }
    };
    write(o, "oracle.txt", &out)?;
    Ok(complete)
}

pub fn check_ld(path: &Path, o: &Opts) -> Result<String, CliError> {
    let s = load(path, o.kind)?;
    let gds = match &s {
        Scenario::Gds(g) => Some(g.clone()),
        Scenario::Gas(sys) => Some(
            embed_gas(&sys.clone().auto_orient())
                .map_err(|e| CliError::Parse(e.to_string()))?
                .0,
        ),
        Scenario::Tam(_) => None,
        _ => return Err(unsupported("check-ld", &s)),
    };
    if let Some(g) = gds {
        return match is_locally_deterministic(&g, o.depth, o.max_states) {
            LdVerdict::HoldsOnExplored { states, complete } => {
                let verdict = if complete { "holds_on_explored" } else { "inconclusive" };
                let line = format!("verdict={verdict} states={states} complete={complete}\n");
                write(o, "ld.txt", &line)?;
                if complete {
                    Ok(line)
                } else {
                    Err(CliError::Bound(line))
                }
            }
            LdVerdict::Counterexample(cx) => {
                let line = format!(
                    "verdict=counterexample depth={} productions={},{} shared={:?}\n",
                    cx.depth, cx.productions.0, cx.productions.1, cx.shared
                );
                write(o, "ld.txt", &line)?;
                write(o, "counterexample.txt", &cx.state.dump())?;
                Err(CliError::Violation(line))
            }
        };
    }
    let Scenario::Tam(sys) = &s else { unreachable!() };
    match is_locally_deterministic_tam(sys, o.max_states) {
        TamLdVerdict::Holds { sequences_result, states } => {
            let line = format!("verdict=holds_on_explored sequences_result={sequences_result} states={states}\n");
            write(o, "ld.txt", &line)?;
            Ok(line)
        }
        TamLdVerdict::Counterexample { site, tile, violation } => {
            let line = format!(
                "verdict=counterexample site={},{} tile={} violation={violation:?}\n",
                site.0, site.1, sys.tiles[tile].name
            );
            write(o, "ld.txt", &line)?;
            write(o, "counterexample.txt", &line)?;
            Err(CliError::Violation(line))
        }
        TamLdVerdict::Inconclusive { states } => {
            let line = format!("verdict=inconclusive states={states}\n");
            write(o, "ld.txt", &line)?;
            Err(CliError::Bound(line))
        }
    }
}

fn procsys(path: &Path, o: &Opts, cmd: &str) -> Result<ProcessorSystem, CliError> {
    match load(path, o.kind)? {
        Scenario::Procsys(m) => Ok(m),
        s => Err(unsupported(cmd, &s)),
    }
}

fn compile(m: &ProcessorSystem, target: Target) -> Result<CompiledSimulation, CliError> {
    Ok(match target {
        Target::Topo => compile_topological(m),
        Target::Z2 => compile_planar(m).map_err(sim_error)?,
        Target::Z3 => compile_3d(m),
    })
}

pub fn compile_sim(path: &Path, o: &Opts) -> Result<String, CliError> {
    let m = procsys(path, o, "compile-sim")?;
    let c = compile(&m, o.target)?;
    let seeds = rng::seeds(o.seed, RUN_SEEDS, o.runs);
    let report = simulation_check(&m, &c, &seeds, o.max_steps);
    write(o, "report.txt", &report.render())?;
    let run = c.run(seeds[0], o.max_steps);
    let trace = Trace {
        events: run.trace.clone(),
        steps: run.engine_events,
        final_config: run.final_config.clone(),
        quiescent: run.terminal,
    };
    write(o, "trace.txt", &trace.render(&m))?;
    let placements = match (&run.lattice, &run.graph) {
        (Some(l), _) => l.dump(&m),
        (None, Some(g)) => g.dump(),
        (None, None) => String::new(),
    };
    write(o, "placements.txt", &placements)?;
    let l = &c.layout;
    let mut layout = format!(
        "target={:?} inbuffer_arity={} message_agent_types={}\n",
        c.target, l.inbuffer_arity, l.message_agent_types
    )
    .to_lowercase();
    for (i, &p) in l.order.iter().enumerate() {
        writeln!(layout, "slot={i} proc={}", m.procs[p].name).unwrap();
    }
    for (i, (&(a, b), z)) in m.network.channels().iter().zip(&l.highway_planes).enumerate() {
        writeln!(layout, "highway={i} from={} to={} plane={z}", m.procs[a].name, m.procs[b].name).unwrap();
    }
    write(o, "layout.txt", &layout)?;
    let verdict = format!("verdict={}\n", if report.passed() { "pass" } else { "fail" });
    if report.passed() {
        Ok(verdict)
    } else {
        Err(CliError::Violation(report.render()))
    }
}

pub fn blockage(path: &Path, o: &Opts) -> Result<String, CliError> {
    let m = procsys(path, o, "blockage")?;
    let out = match adversarial_blockage_search(&m, o.max_states).map_err(sim_error)? {
        Some(found) => found.render(&m),
        None => "blockage=none\n".to_string(),
    };
    write(o, "blockage.txt", &out)?;
    Ok(out.lines().last().map(|l| format!("{l}\n")).unwrap_or_default())
}

fn cost_line(label: &str, r: &SurfaceCostReport) -> String {
    format!(
        "run={label} min={},{},{} max={},{},{} dims={}x{}x{} rectangular={} convex6={} occupied={}\n",
        r.min[0],
        r.min[1],
        r.min[2],
        r.max[0],
        r.max[1],
        r.max[2],
        r.dims[0],
        r.dims[1],
        r.dims[2],
        r.rectangular,
        r.convex_volume6,
        r.occupied
    )
}

pub fn surface_cost(path: &Path, o: &Opts) -> Result<String, CliError> {
    let sc = match load(path, o.kind)? {
        Scenario::Compose(sc) => sc,
        s => return Err(unsupported("surface-cost", &s)),
    };
    let base = sc.base_system()?;
    let seeds = rng::seeds(o.seed, RUN_SEEDS, o.runs);
    let r = compose_then_measure(&base, &sc.network, &sc.ids, sc.degree, &seeds, o.max_steps).map_err(mis_error)?;
    let mut out = cost_line("base", &r.base);
    out.push_str(&cost_line("composed", &r.composed));
    out.push_str(&r.render());
    out.push_str(&r.mis.render(&sc.network));
    write(o, "cost.txt", &out)?;
    Ok(out)
}

pub fn render(path: &Path, o: &Opts) -> Result<String, CliError> {
    match load(path, o.kind)? {
        Scenario::Tam(sys) => {
            let run = run_assembly(&sys, o.seed, o.max_steps);
            write(o, "render.txt", &render_ascii(&sys, &run.result))?;
            write(o, "render.svg", &render_svg(&sys, &run.result))?;
            Ok(format!("tiles={} terminal={}\n", run.result.len(), run.terminal))
        }
        Scenario::Procsys(m) => {
            let c = compile(&m, o.target)?;
            let run = c.run(rng::seeds(o.seed, RUN_SEEDS, 1)[0], o.max_steps);
            match (&run.lattice, &run.graph) {
                (Some(l), _) => {
                    write(o, "render.txt", &l.render_ascii())?;
                    write(o, "render.svg", &l.render_svg())?;
                }
                (None, Some(g)) => write(o, "render.txt", &g.dump())?,
                (None, None) => {}
            }
            Ok(format!("events={} terminal={}\n", run.engine_events, run.terminal))
        }
        s => Err(unsupported("render", &s)),
    }
}
