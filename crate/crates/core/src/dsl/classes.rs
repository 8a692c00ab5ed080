use super::Tag;

/// Where a node's content goes in the emitted markup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Between the opening and closing tag: `<p class=id>text</p>`.
    Inner,
    /// `placeholder="text"` on a text input.
    Placeholder,
    /// `alt="content_desc"` on image-like elements.
    Alt,
    /// A trailing `<label for=id>text</label>`.
    Label,
    /// `value="text"` on a date input.
    Value,
    /// Containers emit no content of their own.
    None,
}

/// Map an Android widget class to its tag. Fully qualified names are
/// matched on their last segment; everything unlisted is a container.
pub fn map_class(native_class: &str) -> (Tag, Placement) {
    let simple = native_class.rsplit('.').next().unwrap_or(native_class);
    match simple {
        "TextView" => (Tag::Paragraph, Placement::Inner),
        "Button" | "ToggleButton" => (Tag::Button, Placement::Inner),
        "ImageView" | "ImageButton" => (Tag::Image, Placement::Alt),
        "EditText" => (Tag::TextInput, Placement::Placeholder),
        "CheckBox" | "Switch" => (Tag::Checkbox, Placement::Label),
        "RadioButton" => (Tag::Radio, Placement::Label),
        "DatePicker" => (Tag::DatePicker, Placement::Value),
        "Spinner" => (Tag::Select, Placement::Label),
        "VideoView" => (Tag::Video, Placement::Alt),
        _ => (Tag::Container, Placement::None),
    }
}
