//! Named model presets, including the bundled 10-community connection
//! matrix used by the synthetic tables.

use crate::config::GraphonSpec;

/// The bundled 10-community SBM spec (random Unif(0.5,1) diagonal,
/// Unif(0, min(P_ii, P_jj)) off-diagonal), values as shipped.
pub const SBM10_JSON: &str = include_str!("../assets/sbm10.json");

/// Look up a named preset.
pub fn preset(name: &str) -> Option<GraphonSpec> {
    match name {
        "ssbm_6_80_20" => Some(GraphonSpec::Ssbm { communities: 6, intra: 0.8, inter: 0.2 }),
        "ssbm_6_55_45" => Some(GraphonSpec::Ssbm { communities: 6, intra: 0.55, inter: 0.45 }),
        "sbm10" => serde_json::from_str(SBM10_JSON).ok(),
        "geometric_11_02" => Some(GraphonSpec::Geometric { dim: 11, threshold: 0.2 }),
        "example_2sbm" => Some(GraphonSpec::Sbm {
            matrix: vec![vec![0.5, 0.25], vec![0.25, 0.75]],
            weights: None,
        }),
        _ => None,
    }
}

pub fn preset_names() -> &'static [&'static str] {
    &["ssbm_6_80_20", "ssbm_6_55_45", "sbm10", "geometric_11_02", "example_2sbm"]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        for name in preset_names() {
            let model = preset(name).unwrap().build().unwrap();
            drop(model);
        }
    }

    #[test]
    fn sbm10_matrix_is_symmetric_with_printed_corner_values() {
        let GraphonSpec::Sbm { matrix, .. } = preset("sbm10").unwrap() else {
            panic!("sbm10 should be an sbm spec")
        };
        assert_eq!(matrix.len(), 10);
        assert_eq!(matrix[0][0], 0.9949);
        assert_eq!(matrix[0][9], 0.6768);
        assert_eq!(matrix[9][9], 0.8526);
        assert_eq!(matrix[4][2], 0.7726);
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(matrix[i][j], matrix[j][i]);
            }
        }
    }
}
