//! IEC 61131-3 object-oriented declarations from a component model.
//!
//! A model lists interfaces and function blocks. [`parse_model`] reads it
//! from JSON (or from structured text in the subset [`emit_st`] writes),
//! maps every name to the upper-snake style of [`to_st_identifier`] and
//! validates it; [`emit_st`] prints it back. For any valid model `m`,
//! `parse_model(&emit_st(&m)) == Ok(m)`.

mod compliance;
mod emit;
mod model;
mod naming;
mod st_parse;

pub use compliance::{check_port_compliance, implemented_interfaces, required_members, ComplianceReport};
pub use emit::emit_st;
pub use model::{plant_model, BlockSpec, CodegenError, ComponentModel, ErrorKind, Location, Member, SourceLines};
pub use naming::{is_elementary, is_identifier, is_keyword, to_st_identifier, ELEMENTARY_TYPES, KEYWORDS};

/// Reads a JSON model document, normalizes names and validates.
pub fn parse_model_json(text: &str) -> Result<ComponentModel, CodegenError> {
    let raw: ComponentModel = serde_json::from_str(text).map_err(|e| {
        CodegenError::new(
            ErrorKind::Syntax,
            e.to_string(),
            Location::at(e.line(), e.column()),
        )
    })?;
    let model = raw.normalized();
    model.validate()?;
    Ok(model)
}

/// Reads structured-text declarations, normalizes names and validates.
pub fn parse_st(text: &str) -> Result<ComponentModel, CodegenError> {
    let (raw, lines) = st_parse::parse_st_raw(text)?;
    let model = raw.normalized();
    model.validate_with(&lines)?;
    Ok(model)
}

/// Reads a model from either format: JSON when the first non-blank
/// character is `{`, structured text otherwise.
pub fn parse_model(text: &str) -> Result<ComponentModel, CodegenError> {
    if text.trim_start().starts_with('{') {
        parse_model_json(text)
    } else {
        parse_st(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_names_are_normalized() {
        let m = parse_model(
            r#"{"interfaces": [{"name": "Process2MHSiloIf", "operations": [
                    {"name": "fillingCompleted"}, {"name": "pouringCompleted"},
                    {"name": "heatingCompleted"}, {"name": "mixingCompleted"}]}],
                "blocks": []}"#,
        )
        .unwrap();
        assert_eq!(m.interfaces[0].name, "PROCESS2MHSILO_IF");
        assert_eq!(m.interfaces[0].operations.len(), 4);
        assert_eq!(m.interfaces[0].operations[3].name, "MIXING_COMPLETED");
    }

    #[test]
    fn malformed_json_is_syntax_with_position() {
        let err = parse_model("{\n  \"blocks\": [,]\n}").unwrap_err();
        assert_eq!(err.kind, ErrorKind::Syntax);
        assert_eq!(err.location.line, Some(2));
        let err = parse_model(r#"{"blocks": [{"name": "A", "color": "red"}]}"#).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Syntax);
    }

    #[test]
    fn plant_model_round_trips() {
        let m = plant_model().normalized();
        assert_eq!(parse_model(&emit_st(&m)).unwrap(), m);
        assert_eq!(parse_model("").unwrap(), ComponentModel::default());
    }

    #[test]
    fn st_semantic_errors_carry_lines() {
        let err = parse_st("FUNCTION_BLOCK A\nEND_FUNCTION_BLOCK\n\nFUNCTION_BLOCK B EXTENDS B\nEND_FUNCTION_BLOCK\n")
            .unwrap_err();
        assert_eq!(err.kind, ErrorKind::CyclicInheritance);
        assert_eq!(err.location.line, Some(4));
    }
}
