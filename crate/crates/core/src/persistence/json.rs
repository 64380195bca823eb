use serde::{Deserialize, Serialize};

use super::{PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub birth: f64,
    pub death: f64,
    pub essential: bool,
    pub birth_vertex: [usize; 3],
    pub death_vertex: [usize; 3],
}

/// File representation of a diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramRecord {
    pub dim: usize,
    pub pairs: Vec<PairRecord>,
    pub construction: String,
    pub filtration: String,
    pub essential_death_value: f64,
}

impl From<&PersistenceDiagram> for DiagramRecord {
    fn from(d: &PersistenceDiagram) -> Self {
        Self {
            dim: d.dim,
            pairs: d
                .pairs
                .iter()
                .map(|p| PairRecord {
                    birth: p.birth,
                    death: p.death,
                    essential: p.essential,
                    birth_vertex: p.birth_vertex,
                    death_vertex: p.death_vertex,
                })
                .collect(),
            construction: "V".into(),
            filtration: "superlevel".into(),
            essential_death_value: d.essential_death_value,
        }
    }
}

impl TryFrom<DiagramRecord> for PersistenceDiagram {
    type Error = Error;

    fn try_from(r: DiagramRecord) -> Result<Self> {
        if r.dim > 2 {
            return Err(Error::Format(format!("diagram dimension {} out of range", r.dim)));
        }
        if r.construction != "V" || r.filtration != "superlevel" {
            return Err(Error::Format(format!(
                "unsupported diagram provenance {}/{}",
                r.construction, r.filtration
            )));
        }
        let pairs = r
            .pairs
            .into_iter()
            .map(|p| {
                if !p.birth.is_finite() || !p.death.is_finite() {
                    return Err(Error::InvalidValue("diagram coordinates must be finite".into()));
                }
                Ok(PersistencePair {
                    dim: r.dim,
                    birth: p.birth,
                    death: p.death,
                    essential: p.essential,
                    birth_cell: None,
                    death_cell: None,
                    birth_vertex: p.birth_vertex,
                    death_vertex: p.death_vertex,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PersistenceDiagram {
            dim: r.dim,
            pairs,
            essential_death_value: r.essential_death_value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::build_superlevel_filtration;
    use crate::persistence::{compute_persistence, PersistenceOptions};
    use crate::volume::Volume;

    #[test]
    fn schema_has_expected_keys() {
        let v = Volume::new([3, 1, 1], vec![1.0, 0.2, 0.8]).unwrap();
        let d = compute_persistence(&build_superlevel_filtration(&v), &PersistenceOptions::default());
        let json = serde_json::to_value(DiagramRecord::from(&d[0])).unwrap();
        assert_eq!(json["dim"], 0);
        assert_eq!(json["construction"], "V");
        assert_eq!(json["filtration"], "superlevel");
        let pairs = json["pairs"].as_array().unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0]["essential"], true);
        assert_eq!(pairs[1]["birth"], 0.8);
        assert_eq!(pairs[1]["death"], 0.2);
        assert_eq!(pairs[1]["birth_vertex"], serde_json::json!([2, 0, 0]));
        assert_eq!(pairs[1]["death_vertex"], serde_json::json!([1, 0, 0]));
    }

    #[test]
    fn record_round_trip_keeps_points() {
        let v = crate::synthetic::uniform_noise([4, 4, 4], 2);
        let d = compute_persistence(&build_superlevel_filtration(&v), &PersistenceOptions::default());
        for diagram in &d {
            let text = serde_json::to_string(&DiagramRecord::from(diagram)).unwrap();
            let back: DiagramRecord = serde_json::from_str(&text).unwrap();
            let back = PersistenceDiagram::try_from(back).unwrap();
            assert_eq!(back.points(), diagram.points());
        }
    }
}
