//! The named-group grammar shared by every subcommand:
//!
//! `borel`, `split`, `split+`, `nonsplit`, `nonsplit+`, `cartan:<dK>,<f>`,
//! `cartan+:<dK>,<f>`, `gl2`, `gens:<matrix;matrix;...>`
//!
//! Matrices use the `a,b;c,d` text form, so a `gens:` list is a run of
//! comma-pair rows separated by semicolons, two rows per matrix.

use modcurve_core::error::{Error, Result};
use modcurve_core::group::Subgroup;
use modcurve_core::standard::{
    borel, cartan_params, cm_cartan, cm_normalizer, nonsplit_cartan, nonsplit_normalizer,
    split_cartan, split_normalizer, CMOrder,
};
use modcurve_core::zmod::{Level, Mat2};
use modcurve_core::Budgets;

/// Resolve a group spec at the given level.
pub fn parse_group(spec: &str, level: &Level, budgets: &Budgets) -> Result<Subgroup> {
    match spec {
        "borel" => borel(level),
        "gl2" => Subgroup::full_gl2(level, budgets.cosets),
        "split" | "split+" | "nonsplit" | "nonsplit+" => {
            let (p, k) = level.prime_power().ok_or(Error::CompositeLevel {
                modulus: level.modulus(),
            })?;
            match spec {
                "split" => split_cartan(p, k),
                "split+" => split_normalizer(p, k),
                "nonsplit" => nonsplit_cartan(p, k),
                _ => nonsplit_normalizer(p, k),
            }
        }
        _ => {
            if let Some(rest) = spec.strip_prefix("cartan+:") {
                let order = parse_order(rest)?;
                cm_normalizer(&cartan_params(&order, level), level)
            } else if let Some(rest) = spec.strip_prefix("cartan:") {
                let order = parse_order(rest)?;
                cm_cartan(&cartan_params(&order, level), level)
            } else if let Some(rest) = spec.strip_prefix("gens:") {
                let gens = parse_matrix_list(rest, level)?;
                Subgroup::closure_capped(level, &gens, budgets.cosets)
            } else {
                Err(Error::ParseMatrix {
                    reason: format!("unknown group name '{spec}'"),
                })
            }
        }
    }
}

fn parse_order(text: &str) -> Result<CMOrder> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::ParseMatrix {
            reason: format!("cartan parameters need '<dK>,<f>', got '{text}'"),
        });
    }
    let disc: i64 = parts[0].trim().parse().map_err(|e| Error::ParseMatrix {
        reason: format!("discriminant '{}': {e}", parts[0].trim()),
    })?;
    let conductor: u64 = parts[1].trim().parse().map_err(|e| Error::ParseMatrix {
        reason: format!("conductor '{}': {e}", parts[1].trim()),
    })?;
    CMOrder::new(disc, conductor)
}

/// Parse a semicolon-separated run of rows into 2x2 matrices, two rows each.
pub fn parse_matrix_list(text: &str, level: &Level) -> Result<Vec<Mat2>> {
    let rows: Vec<&str> = text.split(';').collect();
    if rows.is_empty() || rows.len() % 2 != 0 {
        return Err(Error::ParseMatrix {
            reason: format!(
                "a generator list needs an even number of rows, got {}",
                rows.len()
            ),
        });
    }
    rows.chunks(2)
        .map(|pair| Mat2::parse(&format!("{};{}", pair[0], pair[1]), level))
        .collect()
}
