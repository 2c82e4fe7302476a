use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde_json::Value;
use thiserror::Error;

use crate::automata::{SymbolTable, DROP_NAME};
use crate::snapshot::Granularity;

#[derive(Debug, Error)]
pub enum DbError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid location database: {0}")]
    Json(#[from] serde_json::Error),
    #[error("location record {index}: {message}")]
    Record { index: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationRecord {
    pub name: String,
    pub device: String,
    pub group: String,
    /// Every attribute of the record as text, `name`, `device` and `group`
    /// included.
    pub attrs: BTreeMap<String, String>,
}

impl LocationRecord {
    pub fn new(name: &str, device: &str, group: &str) -> Self {
        let attrs = [("name", name), ("device", device), ("group", group)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        LocationRecord {
            name: name.to_string(),
            device: device.to_string(),
            group: group.to_string(),
            attrs,
        }
    }

    pub fn with_attr(mut self, key: &str, value: &str) -> Self {
        self.attrs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }

    /// The entity this location belongs to at `granularity`.
    pub fn project(&self, granularity: Granularity) -> &str {
        match granularity {
            Granularity::Interface => &self.name,
            Granularity::Device => &self.device,
            Granularity::Group => &self.group,
        }
    }
}

/// The network's locations and their attributes.
#[derive(Debug, Clone, Default)]
pub struct LocationDb {
    records: Vec<LocationRecord>,
    by_name: HashMap<String, usize>,
    attributes: BTreeSet<String>,
}

impl LocationDb {
    pub fn new(records: Vec<LocationRecord>) -> Result<Self, DbError> {
        let mut db = LocationDb::default();
        for (index, record) in records.into_iter().enumerate() {
            for (key, value) in [("name", &record.name), ("device", &record.device), ("group", &record.group)] {
                if value.is_empty() {
                    return Err(DbError::Record {
                        index,
                        message: format!("empty {key}"),
                    });
                }
                if value == DROP_NAME {
                    return Err(DbError::Record {
                        index,
                        message: format!("{key} {DROP_NAME:?} is reserved"),
                    });
                }
            }
            if db.by_name.insert(record.name.clone(), index).is_some() {
                return Err(DbError::Record {
                    index,
                    message: format!("duplicate name {:?}", record.name),
                });
            }
            db.attributes.extend(record.attrs.keys().cloned());
            db.records.push(record);
        }
        Ok(db)
    }

    pub fn from_json(text: &str) -> Result<Self, DbError> {
        let value: Value = serde_json::from_str(text)?;
        let Value::Array(items) = value else {
            return Err(DbError::Record {
                index: 0,
                message: "expected a JSON array of records".into(),
            });
        };
        let mut records = Vec::with_capacity(items.len());
        for (index, item) in items.into_iter().enumerate() {
            let Value::Object(fields) = item else {
                return Err(DbError::Record {
                    index,
                    message: "expected an object".into(),
                });
            };
            let mut attrs = BTreeMap::new();
            for (key, value) in fields {
                let text = match value {
                    Value::String(s) => s,
                    Value::Number(n) => n.to_string(),
                    Value::Bool(b) => b.to_string(),
                    _ => {
                        return Err(DbError::Record {
                            index,
                            message: format!("attribute {key:?} must be a string, number or boolean"),
                        })
                    }
                };
                attrs.insert(key, text);
            }
            let required = |key: &str| {
                attrs.get(key).cloned().ok_or_else(|| DbError::Record {
                    index,
                    message: format!("missing required key {key:?}"),
                })
            };
            let (name, device, group) = (required("name")?, required("device")?, required("group")?);
            records.push(LocationRecord {
                name,
                device,
                group,
                attrs,
            });
        }
        LocationDb::new(records)
    }

    pub fn load(path: &Path) -> Result<Self, DbError> {
        let text = std::fs::read_to_string(path).map_err(|source| DbError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn records(&self) -> &[LocationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&LocationRecord> {
        self.by_name.get(name).map(|&i| &self.records[i])
    }

    pub fn has_attribute(&self, key: &str) -> bool {
        self.attributes.contains(key)
    }

    /// The entity `name` maps to at `granularity`; `drop` maps to itself.
    pub fn project(&self, name: &str, granularity: Granularity) -> Option<&str> {
        if name == DROP_NAME {
            return Some(DROP_NAME);
        }
        self.get(name).map(|r| r.project(granularity))
    }

    /// All entities at `granularity`, sorted.
    pub fn entities(&self, granularity: Granularity) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.project(granularity)).collect()
    }

    /// A symbol table holding `drop` and every entity at `granularity`,
    /// interned in sorted order so symbol ids do not depend on record order.
    pub fn symbol_table(&self, granularity: Granularity) -> SymbolTable {
        let mut table = SymbolTable::new();
        for entity in self.entities(granularity) {
            table.location(entity);
        }
        table
    }

    /// Serializes the records back to the JSON input format.
    pub fn to_json(&self) -> String {
        let items: Vec<Value> = self
            .records
            .iter()
            .map(|r| Value::Object(r.attrs.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect()))
            .collect();
        serde_json::to_string_pretty(&Value::Array(items)).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_records_with_extra_attributes() {
        let db = LocationDb::from_json(
            r#"[{"name":"r1-e0","device":"r1","group":"A1","region":"A","tier":2},
                {"name":"r2-e0","device":"r2","group":"B1"}]"#,
        )
        .unwrap();
        assert_eq!(db.len(), 2);
        assert_eq!(db.get("r1-e0").unwrap().attr("tier"), Some("2"));
        assert!(db.has_attribute("region"));
        assert!(!db.has_attribute("color"));
        assert_eq!(db.project("r2-e0", Granularity::Group), Some("B1"));
        assert_eq!(db.project("drop", Granularity::Device), Some("drop"));
    }

    #[test]
    fn rejects_missing_keys_and_duplicates() {
        assert!(LocationDb::from_json(r#"[{"name":"a","device":"d"}]"#).is_err());
        assert!(LocationDb::from_json(
            r#"[{"name":"a","device":"d","group":"g"},{"name":"a","device":"e","group":"g"}]"#
        )
        .is_err());
        assert!(LocationDb::from_json(r#"[{"name":"drop","device":"d","group":"g"}]"#).is_err());
        assert!(LocationDb::from_json(r#"{"name":"a"}"#).is_err());
    }

    #[test]
    fn symbol_ids_follow_sorted_entities() {
        let db = LocationDb::new(vec![
            LocationRecord::new("z", "dz", "g"),
            LocationRecord::new("a", "da", "g"),
        ])
        .unwrap();
        let table = db.symbol_table(Granularity::Interface);
        assert!(table.get("a").unwrap() < table.get("z").unwrap());
        let groups = db.symbol_table(Granularity::Group);
        assert_eq!(groups.locations().len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let db = LocationDb::new(vec![LocationRecord::new("a", "d", "g").with_attr("region", "A")]).unwrap();
        let again = LocationDb::from_json(&db.to_json()).unwrap();
        assert_eq!(again.records(), db.records());
    }
}
