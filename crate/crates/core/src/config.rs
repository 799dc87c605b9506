/// Enumeration ceilings for whole-group scans and subgroup lattices.
///
/// The defaults keep the full verification run in minutes on a desktop;
/// the CLI exposes flags to raise them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Largest #GL2(Z/NZ) a full matrix scan may traverse.
    pub scan: u64,
    /// Largest subgroup order accepted by `all_subgroups`.
    pub subgroups: u64,
    /// Largest #GL2(Z/NZ) for which a double-coset partition or a
    /// generator-closure of user input is materialized in memory.
    pub cosets: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            scan: 30_000_000,
            subgroups: 5_000,
            cosets: 3_000_000,
        }
    }
}

/// Execution settings shared by the counting entry points.
#[derive(Debug, Clone, Copy)]
pub struct ExecCfg {
    /// Number of worker threads for whole-group scans. Results are
    /// identical for every worker count.
    pub workers: usize,
    pub budgets: Budgets,
}

impl Default for ExecCfg {
    fn default() -> Self {
        let workers = std::thread::available_parallelism()
            .map(|n| n.get().min(16))
            .unwrap_or(1);
        ExecCfg {
            workers,
            budgets: Budgets::default(),
        }
    }
}

impl ExecCfg {
    /// The same configuration restricted to a single worker.
    pub fn serial(self) -> Self {
        ExecCfg { workers: 1, ..self }
    }
}
