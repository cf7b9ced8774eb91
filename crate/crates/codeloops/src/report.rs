//! Enumeration reports and their JSON, CSV and plain-text renderings.

use serde::{Deserialize, Serialize};

use crate::polar::{format_form, parse_form, ParamVector};
use crate::subsets::SubsetTables;
use crate::{Error, Result};

/// A parameter vector in human-readable coordinates: `omega1` lists the basis
/// indices with nonzero squaring bit, `omega2` the pairs (as digit strings
/// like `"25"`) with nonzero commutator bit, and `omega3` the triples in the
/// same `123+145` notation used for associator forms. Omitted fields
/// deserialize as empty (`omega3` as the zero form `"0"`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaSpec {
    #[serde(default)]
    pub omega1: Vec<usize>,
    #[serde(default)]
    pub omega2: Vec<String>,
    #[serde(default = "zero_form_text")]
    pub omega3: String,
}

fn zero_form_text() -> String {
    "0".to_string()
}

impl OmegaSpec {
    pub fn from_params(w: &ParamVector) -> Self {
        OmegaSpec {
            omega1: w.singles().collect(),
            omega2: w.pairs().map(|(i, j)| format!("{i}{j}")).collect(),
            omega3: format_form(&w.triform()),
        }
    }

    pub fn to_params(&self, dim: usize) -> Result<ParamVector> {
        let tables = SubsetTables::get(dim);
        let mut w = ParamVector::zero(dim);
        for &i in &self.omega1 {
            if i == 0 || i > dim {
                return Err(Error::Parse(format!("omega1 index {i} out of range for dim {dim}")));
            }
            w.set1(i, true);
        }
        for token in &self.omega2 {
            let digits: Vec<usize> = token
                .chars()
                .map(|c| c.to_digit(10).map(|x| x as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Parse(format!("malformed pair token {token:?}")))?;
            let [i, j] = digits[..] else {
                return Err(Error::Parse(format!("pair token {token:?} must have two digits")));
            };
            if !(1..=dim).contains(&i) || !(1..=dim).contains(&j) || i >= j {
                return Err(Error::Parse(format!("pair token {token:?} out of range")));
            }
            let _ = tables.pair(i, j);
            w.set2(i, j, true);
        }
        let form = parse_form(&self.omega3, dim)?;
        Ok(w.with_triform(&form))
    }
}

/// One associator-form branch of an enumeration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormRecord {
    /// The form in `123+145` notation (`"0"` for the zero form).
    pub form: String,
    /// Index of this form in the built-in classification, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalogue_id: Option<u32>,
    /// Order of the form's stabilizer in `GL(d, 2)`, in decimal (orders reach
    /// 2^62, past what JSON numbers carry exactly).
    pub stabilizer_order: String,
    /// Orbits of commutator parts under the form stabilizer.
    pub c_orbits: u64,
    /// Code loops with this associator form, up to isomorphism.
    pub loops: u64,
    /// Minimal parameter-vector representatives, capped by the run
    /// configuration; `None` when recording was disabled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representatives: Option<Vec<OmegaSpec>>,
}

/// Complete result of enumerating code loops of order `2^(dim+1)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub dim: usize,
    /// Code loops up to isomorphism (the sum of `loops` over all forms).
    pub total: u64,
    /// Code loops with trivial associator map (groups).
    pub zero_form_total: u64,
    pub forms: Vec<FormRecord>,
}

impl EnumerationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,id,form,stabilizer_order,c_orbits,loops\n");
        for record in &self.forms {
            let id = record.catalogue_id.map(|i| i.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.dim, id, record.form, record.stabilizer_order, record.c_orbits, record.loops
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "code loops of order {} (dimension {})\n",
            1u128 << (self.dim + 1),
            self.dim
        ));
        let form_width =
            self.forms.iter().map(|f| f.form.len()).max().unwrap_or(4).max("form".len());
        let stab_width = self
            .forms
            .iter()
            .map(|f| f.stabilizer_order.len())
            .max()
            .unwrap_or(10)
            .max("stabilizer".len());
        out.push_str(&format!(
            "{:>3}  {:form_width$}  {:>stab_width$}  {:>8}  {:>10}\n",
            "id", "form", "stabilizer", "c-orbits", "loops"
        ));
        for record in &self.forms {
            let id = record.catalogue_id.map(|i| i.to_string()).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:>3}  {:form_width$}  {:>stab_width$}  {:>8}  {:>10}\n",
                id, record.form, record.stabilizer_order, record.c_orbits, record.loops
            ));
        }
        out.push_str(&format!(
            "total: {} loops up to isomorphism ({} with trivial associator)\n",
            self.total, self.zero_form_total
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> EnumerationReport {
        EnumerationReport {
            dim: 4,
            total: 23,
            zero_form_total: 7,
            forms: vec![
                FormRecord {
                    form: "0".into(),
                    catalogue_id: Some(0),
                    stabilizer_order: "20160".into(),
                    c_orbits: 3,
                    loops: 7,
                    representatives: None,
                },
                FormRecord {
                    form: "123".into(),
                    catalogue_id: Some(1),
                    stabilizer_order: "1344".into(),
                    c_orbits: 4,
                    loops: 16,
                    representatives: Some(vec![OmegaSpec {
                        omega1: vec![1],
                        omega2: vec!["12".into()],
                        omega3: "123".into(),
                    }]),
                },
            ],
        }
    }

    #[test]
    fn json_round_trip_is_stable() {
        let report = sample_report();
        let json = report.to_json();
        let back = EnumerationReport::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert_eq!(back.total, 23);
        assert_eq!(back.forms[1].representatives.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn csv_and_text_have_expected_shape() {
        let report = sample_report();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(2).unwrap().starts_with("4,1,123,1344,4,16"));
        let text = report.to_text();
        assert!(text.contains("order 32"));
        assert!(text.contains("total: 23"));
    }

    #[test]
    fn omega_spec_round_trip() {
        let mut w = ParamVector::zero(5);
        w.set1(2, true);
        w.set1(5, true);
        w.set2(1, 4, true);
        w.set3(1, 2, 3, true);
        w.set3(3, 4, 5, true);
        let spec = OmegaSpec::from_params(&w);
        assert_eq!(spec.omega1, vec![2, 5]);
        assert_eq!(spec.omega2, vec!["14".to_string()]);
        assert_eq!(spec.omega3, "123+345");
        assert_eq!(spec.to_params(5).unwrap(), w);
    }

    #[test]
    fn omega_spec_fields_default_when_omitted() {
        let partial: OmegaSpec = serde_json::from_str(r#"{"omega3":"123"}"#).unwrap();
        let full: OmegaSpec =
            serde_json::from_str(r#"{"omega1":[],"omega2":[],"omega3":"123"}"#).unwrap();
        assert_eq!(partial, full);
        let empty: OmegaSpec = serde_json::from_str("{}").unwrap();
        assert_eq!(empty.to_params(4).unwrap(), ParamVector::zero(4));
    }

    #[test]
    fn omega_spec_rejects_bad_tokens() {
        let bad_pair = OmegaSpec {
            omega1: vec![],
            omega2: vec!["41".into()],
            omega3: "0".into(),
        };
        assert!(bad_pair.to_params(5).is_err());
        let bad_index = OmegaSpec { omega1: vec![9], omega2: vec![], omega3: "0".into() };
        assert!(bad_index.to_params(5).is_err());
    }
}
