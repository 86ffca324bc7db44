use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::pricing::{LatencyModel, PricingEntry};
use super::spec::ToolSpec;
use crate::error::ToolError;

/// Ordered tool set plus the pricing and latency tables its tools refer to.
///
/// Index `i` of [`ToolCatalog::tools`] is the tool's coordinate in metric and
/// preference vectors. Registering a tool only ever appends.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "CatalogParts")]
pub struct ToolCatalog {
    tools: Vec<ToolSpec>,
    pricing: BTreeMap<String, PricingEntry>,
    latency: BTreeMap<String, LatencyModel>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct CatalogParts {
    tools: Vec<ToolSpec>,
    pricing: BTreeMap<String, PricingEntry>,
    latency: BTreeMap<String, LatencyModel>,
}

impl TryFrom<CatalogParts> for ToolCatalog {
    type Error = ToolError;

    fn try_from(parts: CatalogParts) -> Result<Self, Self::Error> {
        Self::from_parts(parts.tools, parts.pricing, parts.latency)
    }
}

impl PartialEq for ToolCatalog {
    fn eq(&self, other: &Self) -> bool {
        self.tools == other.tools && self.pricing == other.pricing && self.latency == other.latency
    }
}

impl ToolCatalog {
    pub fn new(
        pricing: BTreeMap<String, PricingEntry>,
        latency: BTreeMap<String, LatencyModel>,
    ) -> Result<Self, ToolError> {
        for p in pricing.values() {
            p.validate()?;
        }
        for l in latency.values() {
            l.validate()?;
        }
        Ok(Self {
            tools: Vec::new(),
            pricing,
            latency,
            index: HashMap::new(),
        })
    }

    /// Builds a catalog from tool objects, registering them in order.
    pub fn from_parts(
        tools: Vec<ToolSpec>,
        pricing: BTreeMap<String, PricingEntry>,
        latency: BTreeMap<String, LatencyModel>,
    ) -> Result<Self, ToolError> {
        let mut catalog = Self::new(pricing, latency)?;
        for tool in tools {
            catalog.register(tool)?;
        }
        Ok(catalog)
    }

    /// Appends `spec` at the next index.
    pub fn register_tool(mut self, spec: ToolSpec) -> Result<Self, ToolError> {
        self.register(spec)?;
        Ok(self)
    }

    pub fn register(&mut self, spec: ToolSpec) -> Result<usize, ToolError> {
        if self.index.contains_key(&spec.name) {
            return Err(ToolError::DuplicateTool(spec.name));
        }
        spec.validate_schema()?;
        if !self.pricing.contains_key(&spec.pricing_ref) {
            return Err(ToolError::UnknownPricingRef(spec.pricing_ref));
        }
        if !self.latency.contains_key(&spec.latency_ref) {
            return Err(ToolError::UnknownLatencyRef(spec.latency_ref));
        }
        let idx = self.tools.len();
        self.index.insert(spec.name.clone(), idx);
        self.tools.push(spec);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    pub fn tools(&self) -> &[ToolSpec] {
        &self.tools
    }

    pub fn names(&self) -> Vec<String> {
        self.tools.iter().map(|t| t.name.clone()).collect()
    }

    /// Zero-based position of `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Option<&ToolSpec> {
        self.index_of(name).map(|i| &self.tools[i])
    }

    pub fn pricing_table(&self) -> &BTreeMap<String, PricingEntry> {
        &self.pricing
    }

    pub fn latency_table(&self) -> &BTreeMap<String, LatencyModel> {
        &self.latency
    }

    pub fn pricing_for(&self, tool: &ToolSpec) -> Result<&PricingEntry, ToolError> {
        self.pricing
            .get(&tool.pricing_ref)
            .ok_or_else(|| ToolError::UnknownPricingRef(tool.pricing_ref.clone()))
    }

    pub fn latency_for(&self, tool: &ToolSpec) -> Result<&LatencyModel, ToolError> {
        self.latency
            .get(&tool.latency_ref)
            .ok_or_else(|| ToolError::UnknownLatencyRef(tool.latency_ref.clone()))
    }

    /// Same tools, with pricing entries replaced where `overrides` names them.
    pub fn with_pricing(&self, overrides: &BTreeMap<String, PricingEntry>) -> Result<Self, ToolError> {
        let mut out = self.clone();
        for (name, entry) in overrides {
            entry.validate()?;
            if !out.pricing.contains_key(name) {
                return Err(ToolError::UnknownPricingRef(name.clone()));
            }
            out.pricing.insert(name.clone(), *entry);
        }
        Ok(out)
    }

    /// Multiplies every price by `factor`.
    pub fn with_scaled_pricing(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for entry in out.pricing.values_mut() {
            *entry = entry.scaled(factor);
        }
        out
    }

    /// Catalog restricted to `names`, keeping this catalog's relative order.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<Self, ToolError> {
        for n in names {
            if self.index_of(n.as_ref()).is_none() {
                return Err(ToolError::UnknownTool(n.as_ref().to_string()));
            }
        }
        let keep: Vec<ToolSpec> = self
            .tools
            .iter()
            .filter(|t| names.iter().any(|n| n.as_ref() == t.name))
            .cloned()
            .collect();
        Self::from_parts(keep, self.pricing.clone(), self.latency.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tool_registry::{ParamSpec, ParamType, ToolKind};

    pub(crate) fn tool(name: &str) -> ToolSpec {
        ToolSpec {
            name: name.into(),
            description: format!("{name} tool"),
            params: vec![ParamSpec::required("query", ParamType::String, "query")],
            kind: ToolKind::Search,
            pricing_ref: "free".into(),
            latency_ref: "fast".into(),
            binding: None,
        }
    }

    fn empty() -> ToolCatalog {
        ToolCatalog::new(
            BTreeMap::from([("free".to_string(), PricingEntry::free())]),
            BTreeMap::from([("fast".to_string(), LatencyModel::constant(0.1))]),
        )
        .unwrap()
    }

    #[test]
    fn first_registration_gets_first_index() {
        let c = empty().register_tool(tool("web_search")).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.index_of("web_search"), Some(0));
    }

    #[test]
    fn duplicate_name_rejected() {
        let c = empty().register_tool(tool("web_search")).unwrap();
        match c.register_tool(tool("web_search")) {
            Err(ToolError::DuplicateTool(n)) => assert_eq!(n, "web_search"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn appendix_example_ordering() {
        // Tool order of the privacy-persona example: local search sits at vector position 2.
        let names = ["web_search", "local_search", "qwen3_235b", "llama_3_3_70b", "o3_mini", "o3"];
        let mut c = empty();
        for n in names {
            c.register(tool(n)).unwrap();
        }
        assert_eq!(c.index_of("local_search").map(|i| i + 1), Some(2));
    }

    #[test]
    fn registering_never_moves_existing_tools() {
        let mut c = empty();
        let mut seen = Vec::new();
        for i in 0..20 {
            let name = format!("t{i}");
            c.register(tool(&name)).unwrap();
            seen.push(name);
            for (j, n) in seen.iter().enumerate() {
                assert_eq!(c.index_of(n), Some(j));
            }
        }
    }

    #[test]
    fn unknown_refs_rejected() {
        let mut t = tool("x");
        t.pricing_ref = "nope".into();
        assert!(matches!(empty().register_tool(t), Err(ToolError::UnknownPricingRef(_))));
    }

    #[test]
    fn subset_keeps_order_and_round_trips() {
        let mut c = empty();
        for n in ["a", "b", "c", "d"] {
            c.register(tool(n)).unwrap();
        }
        let s = c.subset(&["d", "b"]).unwrap();
        assert_eq!(s.names(), vec!["b", "d"]);
        assert!(c.subset(&["zzz"]).is_err());
        let text = serde_json::to_string(&c).unwrap();
        let back: ToolCatalog = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.index_of("c"), Some(2));
    }
}
