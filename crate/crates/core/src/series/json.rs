//! JSON form of a jet: `{"nvars", "truncation", "terms": [[exps], "p/q"]}`.

use std::str::FromStr;

use num_rational::BigRational;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{Jet, Multiindex};

#[derive(Serialize, Deserialize)]
struct JetRepr {
    nvars: usize,
    truncation: u32,
    terms: Vec<(Vec<u32>, String)>,
}

impl Serialize for Jet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        JetRepr {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: self.coeffs.iter().map(|(e, c)| (e.0.clone(), c.to_string())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Jet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = JetRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(r.terms.len());
        for (e, c) in r.terms {
            if e.len() != r.nvars {
                return Err(de::Error::custom(format!("exponent {e:?} does not have {} entries", r.nvars)));
            }
            let c = BigRational::from_str(&c).map_err(|_| de::Error::custom(format!("bad rational {c:?}")))?;
            terms.push((Multiindex(e), c));
        }
        Ok(Jet::from_terms(r.nvars, r.truncation, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let j = Jet::from_int_terms(2, 7, &[(&[0, 2], 1), (&[3, 0], -1)]).scale(&BigRational::new(3.into(), 2.into()));
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(s, r#"{"nvars":2,"truncation":7,"terms":[[[0,2],"3/2"],[[3,0],"-3/2"]]}"#);
        assert_eq!(serde_json::from_str::<Jet>(&s).unwrap(), j);
        assert!(serde_json::from_str::<Jet>(r#"{"nvars":2,"truncation":7,"terms":[[[0],"1"]]}"#).is_err());
    }
}
