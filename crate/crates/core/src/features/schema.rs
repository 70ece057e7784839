//! The fixed 47-slot handcrafted feature schema: 33 method features followed
//! by 14 code-complexity features. Every predicate is a token-level rule
//! (no parsing) and is recorded in the serialized schema for auditability.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub const METHOD_FEATURES: usize = 33;
pub const COMPLEXITY_FEATURES: usize = 14;
pub const TOTAL_FEATURES: usize = METHOD_FEATURES + COMPLEXITY_FEATURES;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    MethodFeature,
    ComplexityFeature,
}

/// Token-level counting rule behind one feature slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    /// Identifier immediately followed by `(` whose text equals this name.
    InvocationExact(&'static str),
    /// Invocation whose name contains this string, case-insensitively.
    InvocationContains(&'static str),
    /// Invocation whose name starts with this prefix and is strictly longer.
    InvocationPrefix(&'static str),
    /// Any token whose text equals one of these alternatives.
    TokenText(&'static [&'static str]),
    /// Identifier containing this substring, case-insensitively.
    IdentifierContains(&'static str),
    /// Identifier with exactly this text, immediately followed by `.`.
    IdentifierDot(&'static str),
    /// Operator token with exactly this text.
    Operator(&'static str),
    /// `?` of a conditional expression (not a generics wildcard).
    Ternary,
    /// `return` followed by a non-`;` token.
    ReturnValue,
    /// Non-blank source lines after comment stripping.
    Loc,
    /// `{` tokens.
    Blocks,
    /// 1 + decisions + jumps: straight-line-segment approximation.
    BasicBlocks,
    /// Parameters in the declaration parameter list.
    Parameters,
    /// In-body local variable declaration statements.
    LocalVariables,
    /// Distinct identifiers used but never declared as parameter or local.
    GlobalVariables,
    /// `for` / `while` / `do` keywords.
    Loops,
    /// `break` / `continue` keywords.
    Jumps,
    /// `if` keywords + `case` keywords + ternaries.
    Decisions,
    /// Relational and logical operator tokens.
    Conditions,
    /// `new` keywords.
    Allocations,
    /// All invocations.
    Invocations,
    /// `try` keywords.
    TryBlocks,
    /// `Thread` / `Runnable` identifiers and `synchronized` keywords.
    ThreadTokens,
}

impl Predicate {
    /// Stable identifier written into the serialized schema.
    pub fn id(&self) -> String {
        match self {
            Predicate::InvocationExact(s) => format!("invocation_exact:{s}"),
            Predicate::InvocationContains(s) => format!("invocation_contains_ci:{s}"),
            Predicate::InvocationPrefix(s) => format!("invocation_prefix:{s}"),
            Predicate::TokenText(alts) => format!("token_text:{}", alts.join("|")),
            Predicate::IdentifierContains(s) => format!("identifier_contains_ci:{s}"),
            Predicate::IdentifierDot(s) => format!("identifier_dot:{s}"),
            Predicate::Operator(s) => format!("operator:{s}"),
            Predicate::Ternary => "ternary".into(),
            Predicate::ReturnValue => "return_value".into(),
            Predicate::Loc => "loc".into(),
            Predicate::Blocks => "blocks".into(),
            Predicate::BasicBlocks => "basic_blocks".into(),
            Predicate::Parameters => "parameters".into(),
            Predicate::LocalVariables => "local_variables".into(),
            Predicate::GlobalVariables => "global_variables".into(),
            Predicate::Loops => "loops".into(),
            Predicate::Jumps => "jumps".into(),
            Predicate::Decisions => "decisions".into(),
            Predicate::Conditions => "conditions".into(),
            Predicate::Allocations => "allocations".into(),
            Predicate::Invocations => "invocations".into(),
            Predicate::TryBlocks => "try_blocks".into(),
            Predicate::ThreadTokens => "thread_tokens".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FeatureEntry {
    pub name: &'static str,
    pub predicate: Predicate,
    pub group: FeatureGroup,
}

impl Serialize for FeatureEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FeatureEntry", 3)?;
        s.serialize_field("name", self.name)?;
        s.serialize_field("predicate_id", &self.predicate.id())?;
        s.serialize_field("group", &self.group)?;
        s.end()
    }
}

/// The 47-entry feature schema, in canonical order.
#[derive(Debug, Clone, Serialize)]
pub struct FeatureSchema {
    pub version: &'static str,
    pub entries: Vec<FeatureEntry>,
}

impl FeatureSchema {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}

impl Default for FeatureSchema {
    fn default() -> Self {
        schema()
    }
}

macro_rules! entry {
    ($name:expr, $group:ident, $pred:expr) => {
        FeatureEntry {
            name: $name,
            predicate: $pred,
            group: FeatureGroup::$group,
        }
    };
}

/// Build the canonical schema. The 33 method features are grouped by the
/// method name they were curated for; the 14 complexity features follow
/// under a `CX:` prefix (the prefix keeps the two `Instance` features
/// distinct).
pub fn schema() -> FeatureSchema {
    use Predicate::*;
    let entries = vec![
        // equals
        entry!("Instance", MethodFeature, TokenText(&["instanceof"])),
        entry!("Boolean", MethodFeature, TokenText(&["boolean", "Boolean"])),
        entry!("equals", MethodFeature, InvocationExact("equals")),
        entry!("This", MethodFeature, TokenText(&["this"])),
        // main
        entry!("Println", MethodFeature, InvocationExact("println")),
        entry!("String", MethodFeature, TokenText(&["String"])),
        // setUp
        entry!("Super", MethodFeature, TokenText(&["super"])),
        entry!("setup", MethodFeature, InvocationContains("setup")),
        entry!("New", MethodFeature, TokenText(&["new"])),
        entry!("build", MethodFeature, InvocationExact("build")),
        entry!("add", MethodFeature, InvocationExact("add")),
        // onCreate
        entry!("Bundle", MethodFeature, TokenText(&["Bundle"])),
        entry!("onCreate", MethodFeature, InvocationExact("onCreate")),
        entry!(
            "setContentView",
            MethodFeature,
            InvocationExact("setContentView")
        ),
        entry!("R", MethodFeature, IdentifierDot("R")),
        // toString
        entry!("toString", MethodFeature, InvocationExact("toString")),
        entry!("format", MethodFeature, InvocationExact("format")),
        entry!(
            "StringBuilder",
            MethodFeature,
            TokenText(&["StringBuilder", "StringBuffer"])
        ),
        entry!("append", MethodFeature, InvocationExact("append")),
        entry!("+", MethodFeature, Operator("+")),
        // run
        entry!("Handler", MethodFeature, TokenText(&["Handler"])),
        entry!("error", MethodFeature, IdentifierContains("error")),
        entry!("message", MethodFeature, IdentifierContains("message")),
        // hashCode
        entry!("hashCode", MethodFeature, InvocationExact("hashCode")),
        entry!("TernaryOperator", MethodFeature, Ternary),
        // init
        entry!("init", MethodFeature, InvocationContains("init")),
        entry!("set", MethodFeature, InvocationPrefix("set")),
        entry!("create", MethodFeature, InvocationContains("create")),
        // execute
        entry!("CommandLine", MethodFeature, TokenText(&["CommandLine"])),
        entry!("execute", MethodFeature, InvocationContains("execute")),
        entry!("response", MethodFeature, IdentifierContains("response")),
        // get
        entry!("Return", MethodFeature, ReturnValue),
        entry!("get", MethodFeature, InvocationPrefix("get")),
        // complexity features
        entry!("CX:LOC", ComplexityFeature, Loc),
        entry!("CX:Block", ComplexityFeature, Blocks),
        entry!("CX:BasicBlock", ComplexityFeature, BasicBlocks),
        entry!("CX:Parameter", ComplexityFeature, Parameters),
        entry!("CX:LocalVariable", ComplexityFeature, LocalVariables),
        entry!("CX:GlobalVariable", ComplexityFeature, GlobalVariables),
        entry!("CX:Loop", ComplexityFeature, Loops),
        entry!("CX:Jump", ComplexityFeature, Jumps),
        entry!("CX:Decision", ComplexityFeature, Decisions),
        entry!("CX:Condition", ComplexityFeature, Conditions),
        entry!("CX:Instance", ComplexityFeature, Allocations),
        entry!("CX:Function", ComplexityFeature, Invocations),
        entry!("CX:TryCatch", ComplexityFeature, TryBlocks),
        entry!("CX:Thread", ComplexityFeature, ThreadTokens),
    ];
    FeatureSchema {
        version: SCHEMA_VERSION,
        entries,
    }
}
