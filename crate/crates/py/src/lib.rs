//! Python bindings. Systems are parsed from the same text formats the CLI
//! reads; results come back as plain Python values or `key=value` text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use graphasm::gds::{self, Gds};
use graphasm::graph::{self, Bounds, GraphAssemblySystem, Strategy};
use graphasm::mis;
use graphasm::sim::{self, CompiledSimulation, NetworkGraph, ProcessorSystem};
use graphasm::tam::{self, TileAssemblySystem};
use graphasm::text;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A graph assembly system.
#[pyclass(name = "Grammar")]
struct PyGrammar(GraphAssemblySystem);

#[pymethods]
impl PyGrammar {
    #[staticmethod]
    fn parse(src: &str) -> PyResult<Self> {
        text::parse_grammar(src).map(PyGrammar).map_err(err)
    }

    fn to_text(&self) -> String {
        text::write_grammar(&self.0)
    }

    /// Stable connected graphs, as `vertex`/`edge` dumps, and whether the
    /// search finished.
    #[pyo3(signature = (max_depth = 64, max_states = 10_000))]
    fn language(&self, max_depth: usize, max_states: usize) -> (Vec<String>, bool) {
        let l = graph::language(
            &self.0,
            Bounds {
                max_depth,
                max_states,
                strategy: Strategy::Bfs,
            },
        );
        (l.members.iter().map(|g| g.dump()).collect(), l.complete)
    }

    fn embed(&self) -> PyResult<PyGds> {
        gds::embed_gas(&self.0.clone().auto_orient())
            .map(|(g, _)| PyGds(g))
            .map_err(err)
    }
}

/// A grammar for distributed systems.
#[pyclass(name = "Gds")]
struct PyGds(Gds);

#[pymethods]
impl PyGds {
    #[staticmethod]
    fn parse(src: &str) -> PyResult<Self> {
        text::parse_gds(src).map(PyGds).map_err(err)
    }

    /// `"holds"`, `"inconclusive"` or `"counterexample"`.
    #[pyo3(signature = (depth = 12, max_states = 10_000))]
    fn check_ld(&self, depth: usize, max_states: usize) -> &'static str {
        match gds::is_locally_deterministic(&self.0, depth, max_states) {
            gds::LdVerdict::HoldsOnExplored { complete: true, .. } => "holds",
            gds::LdVerdict::HoldsOnExplored { .. } => "inconclusive",
            gds::LdVerdict::Counterexample(_) => "counterexample",
        }
    }

    /// `True`, `False`, or `None` when bounds cut the search.
    #[pyo3(signature = (depth = 12, max_states = 10_000))]
    fn unique_result(&self, depth: usize, max_states: usize) -> Option<bool> {
        match gds::unique_result_oracle(&self.0, depth, max_states) {
            gds::OracleOutcome::Unique { .. } => Some(true),
            gds::OracleOutcome::NotUnique { .. } => Some(false),
            gds::OracleOutcome::Inconclusive { .. } => None,
        }
    }

    /// Dump of the system reached by a weakly fair run.
    #[pyo3(signature = (seed = 0, max_steps = 1000))]
    fn run(&self, seed: u64, max_steps: usize) -> String {
        gds::run_weakly_fair(&self.0, seed, gds::RunConfig::steps(max_steps))
            .result()
            .dump()
    }
}

/// A temperature-2 tile assembly system.
#[pyclass(name = "TileSet")]
struct PyTileSet(TileAssemblySystem);

#[pymethods]
impl PyTileSet {
    #[staticmethod]
    fn parse(src: &str) -> PyResult<Self> {
        tam::parse_tileset(src).map(PyTileSet).map_err(err)
    }

    /// Terminal assemblies as `x y tile` dumps, and whether the search finished.
    #[pyo3(signature = (max_states = 100_000))]
    fn terminal_assemblies(&self, max_states: usize) -> (Vec<String>, bool) {
        let t = tam::terminal_assemblies(&self.0, max_states);
        (t.assemblies.iter().map(|a| self.0.dump(a)).collect(), t.complete)
    }

    #[pyo3(signature = (max_states = 100_000))]
    fn is_locally_deterministic(&self, max_states: usize) -> bool {
        tam::is_locally_deterministic_tam(&self.0, max_states).holds()
    }

    /// Dump of a seeded assembly sequence's result.
    #[pyo3(signature = (seed = 0, max_tiles = 10_000))]
    fn run(&self, seed: u64, max_tiles: usize) -> String {
        self.0.dump(&tam::run_assembly(&self.0, seed, max_tiles).result)
    }

    #[pyo3(signature = (seed = 0, max_tiles = 10_000))]
    fn render(&self, seed: u64, max_tiles: usize) -> String {
        tam::render_ascii(&self.0, &tam::run_assembly(&self.0, seed, max_tiles).result)
    }
}

/// Asynchronous processors on a directed network with FIFO channels.
#[pyclass(name = "ProcessorSystem")]
struct PyProcessorSystem(ProcessorSystem);

#[pymethods]
impl PyProcessorSystem {
    #[staticmethod]
    fn parse(src: &str) -> PyResult<Self> {
        sim::parse_procsys(src).map(PyProcessorSystem).map_err(err)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.0.procs.iter().map(|p| p.name.clone()).collect()
    }

    /// Rendered trace of a seeded direct run.
    #[pyo3(signature = (seed = 0, max_steps = 100_000))]
    fn execute(&self, seed: u64, max_steps: usize) -> String {
        sim::direct_execute(&self.0, seed, max_steps).render(&self.0)
    }

    /// `target` is `"topo"`, `"z2"` or `"z3"`.
    fn compile(&self, target: &str) -> PyResult<PyCompiled> {
        let c = match target {
            "topo" => sim::compile_topological(&self.0),
            "z2" => sim::compile_planar(&self.0).map_err(err)?,
            "z3" => sim::compile_3d(&self.0),
            other => return Err(err(format!("unknown target `{other}`"))),
        };
        Ok(PyCompiled(c))
    }

    /// Witness lines, or `None` when every layout routes without crossings.
    #[pyo3(signature = (max_states = 100_000))]
    fn blockage(&self, max_states: usize) -> PyResult<Option<String>> {
        Ok(sim::adversarial_blockage_search(&self.0, max_states)
            .map_err(err)?
            .map(|o| o.render(&self.0)))
    }
}

#[pyclass(name = "CompiledSimulation")]
struct PyCompiled(CompiledSimulation);

#[pymethods]
impl PyCompiled {
    /// Report text; its last line is `verdict=pass` or `verdict=fail`.
    #[pyo3(signature = (seeds, budget = 1_000_000))]
    fn check(&self, seeds: Vec<u64>, budget: usize) -> String {
        sim::simulation_check(&self.0.system, &self.0, &seeds, budget).render()
    }

    /// Occupied lattice cells of a seeded run, padded to three coordinates.
    #[pyo3(signature = (seed = 0, budget = 1_000_000))]
    fn placements(&self, seed: u64, budget: usize) -> Vec<(i64, i64, i64)> {
        self.0
            .run(seed, budget)
            .lattice
            .map(|l| l.points().into_iter().map(|[x, y, z]| (x, y, z)).collect())
            .unwrap_or_default()
    }

    #[getter]
    fn inbuffer_arity(&self) -> usize {
        self.0.layout.inbuffer_arity
    }
}

fn network(n: usize, edges: Vec<(usize, usize)>) -> PyResult<NetworkGraph> {
    NetworkGraph::undirected(n, &edges).map_err(err)
}

/// Vertices of the maximal independent set and the number of rounds.
#[pyfunction]
fn mis_run(n: usize, edges: Vec<(usize, usize)>, ids: Vec<u64>) -> PyResult<(Vec<usize>, usize)> {
    let r = mis::mis_run(&network(n, edges)?, &ids).map_err(err)?;
    Ok((r.set.into_iter().collect(), r.rounds))
}

/// Whether every `r`-ball, `r <= r_max`, keeps its independence number
/// within the polynomial with coefficients `f` (constant term first).
#[pyfunction]
fn is_growth_bounded(n: usize, edges: Vec<(usize, usize)>, f: Vec<u64>, r_max: usize) -> PyResult<bool> {
    Ok(mis::is_growth_bounded(&network(n, edges)?, &f, r_max).verdict)
}

/// `(dims, rectangular, convex volume, occupied)` of unit cells at `points`.
#[pyfunction]
fn surface_cost(points: Vec<(i64, i64, i64)>) -> PyResult<((i64, i64, i64), i64, f64, usize)> {
    let pts: Vec<[i64; 3]> = points.into_iter().map(|(x, y, z)| [x, y, z]).collect();
    let r = mis::rectangular_surface_cost(&pts).map_err(err)?;
    Ok(((r.dims[0], r.dims[1], r.dims[2]), r.rectangular, r.convex(), r.occupied))
}

/// Per-axis box growth from appending the synchronized MIS to a padded
/// max-id flood of `flood_rounds` rounds on a `side x side` grid.
#[pyfunction]
#[pyo3(signature = (side, flood_rounds = 2, first_id = 64, seeds = vec![0, 1]))]
fn grid_compose_deltas(side: usize, flood_rounds: usize, first_id: u64, seeds: Vec<u64>) -> PyResult<(i64, i64, i64)> {
    let g = mis::grid(side, side);
    let ids: Vec<u64> = (0..side * side).map(|v| first_id + v as u64).collect();
    let opts = mis::AlphaOptions {
        pad_to_degree: Some(4),
        ..mis::AlphaOptions::default()
    };
    let base = mis::alpha_wrap(
        &mis::MaxFlood {
            ids: ids.clone(),
            rounds: flood_rounds,
        },
        &g,
        &opts,
    );
    let r = mis::compose_then_measure(&base, &g, &ids, 4, &seeds, 10_000_000).map_err(err)?;
    Ok((r.deltas[0], r.deltas[1], r.deltas[2]))
}

#[pymodule]
#[pyo3(name = "graphasm")]
fn graphasm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrammar>()?;
    m.add_class::<PyGds>()?;
    m.add_class::<PyTileSet>()?;
    m.add_class::<PyProcessorSystem>()?;
    m.add_class::<PyCompiled>()?;
    m.add_function(wrap_pyfunction!(mis_run, m)?)?;
    m.add_function(wrap_pyfunction!(is_growth_bounded, m)?)?;
    m.add_function(wrap_pyfunction!(surface_cost, m)?)?;
    m.add_function(wrap_pyfunction!(grid_compose_deltas, m)?)?;
    Ok(())
}
