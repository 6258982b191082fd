use crate::error::Result;
use crate::machine::InitialTransducer;
use crate::prefix_map::PrefixExchangeMap;
use crate::word::EpWord;

/// A map on Cantor space that can be evaluated at eventually periodic points.
pub trait CantorMap {
    fn alphabet_size(&self) -> usize;
    fn apply(&self, x: &EpWord) -> Result<EpWord>;
}

impl CantorMap for InitialTransducer {
    fn alphabet_size(&self) -> usize {
        InitialTransducer::alphabet_size(self)
    }

    fn apply(&self, x: &EpWord) -> Result<EpWord> {
        self.evaluate_ep(x)
    }
}

impl CantorMap for PrefixExchangeMap {
    fn alphabet_size(&self) -> usize {
        PrefixExchangeMap::alphabet_size(self)
    }

    fn apply(&self, x: &EpWord) -> Result<EpWord> {
        PrefixExchangeMap::apply(self, x)
    }
}
