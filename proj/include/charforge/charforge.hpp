#pragma once

#include "charforge/clause_extractor.hpp"
#include "charforge/config.hpp"
#include "charforge/conllu.hpp"
#include "charforge/contracts.hpp"
#include "charforge/corpus_store.hpp"
#include "charforge/date.hpp"
#include "charforge/demo_synthesizer.hpp"
#include "charforge/embedder.hpp"
#include "charforge/entity_resolver.hpp"
#include "charforge/error.hpp"
#include "charforge/evaluation.hpp"
#include "charforge/gerund.hpp"
#include "charforge/http_embedder.hpp"
#include "charforge/io.hpp"
#include "charforge/metrics.hpp"
#include "charforge/pipeline.hpp"
#include "charforge/prompts.hpp"
#include "charforge/references.hpp"
#include "charforge/text.hpp"
