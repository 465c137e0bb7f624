//! Word actors: one instantiated lexical item (or predicted placeholder)
//! inside a phrase.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::features::FeatureStructure;
use crate::grammar::{ClassId, LexemeId};
use crate::kb::InstanceId;

/// Textual position. A placeholder stands for a word that has not been read
/// yet and therefore sorts after every token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Token(u32),
    Predicted,
}

impl Position {
    pub fn token(self) -> Option<u32> {
        match self {
            Position::Token(t) => Some(t),
            Position::Predicted => None,
        }
    }
}

/// Indices below refer to other words of the same phrase; valency indices
/// refer to the owning word's effective frame (see [`crate::syntax::frame_of`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WordActor {
    pub lexeme: Option<LexemeId>,
    pub class: ClassId,
    pub position: Position,
    pub features: Arc<FeatureStructure>,
    /// `(valency index, modifier word)`.
    pub filled: Vec<(u16, u32)>,
    /// `(head word, valency index in the head's frame)`.
    pub head: Option<(u32, u16)>,
    pub instance: Option<InstanceId>,
    pub placeholder: bool,
    /// For placeholders: whether the prediction was mandatory.
    pub mandatory: bool,
}

impl WordActor {
    pub fn lexical(
        lexeme: Option<LexemeId>,
        class: ClassId,
        token: u32,
        features: Arc<FeatureStructure>,
        instance: Option<InstanceId>,
    ) -> Self {
        WordActor {
            lexeme,
            class,
            position: Position::Token(token),
            features,
            filled: Vec::new(),
            head: None,
            instance,
            placeholder: false,
            mandatory: false,
        }
    }

    pub fn placeholder(class: ClassId, features: Arc<FeatureStructure>, mandatory: bool) -> Self {
        WordActor {
            lexeme: None,
            class,
            position: Position::Predicted,
            features,
            filled: Vec::new(),
            head: None,
            instance: None,
            placeholder: true,
            mandatory,
        }
    }

    pub fn is_filled(&self, valency: u16) -> bool {
        self.filled.iter().any(|&(v, _)| v == valency)
    }

    pub fn token(&self) -> Option<u32> {
        self.position.token()
    }
}
