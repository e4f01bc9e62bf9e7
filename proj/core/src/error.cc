// Copyright 2026 The semtag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semtag/error.h"

namespace semtag {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedAtom: return "MalformedAtom";
    case ErrorCode::kVariableOutOfRange: return "VariableOutOfRange";
    case ErrorCode::kUnanchorableProperName: return "UnanchorableProperName";
    case ErrorCode::kDanglingArgument: return "DanglingArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kCorpusParse: return "CorpusParse";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kUnanchoredVertex: return "UnanchoredVertex";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptySentence: return "EmptySentence";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kTooManyInstances: return "TooManyInstances";
    case ErrorCode::kDivergedLoss: return "DivergedLoss";
    case ErrorCode::kUnknownHead: return "UnknownHead";
    case ErrorCode::kCheckpointMismatch: return "CheckpointMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
  }
  return "Unknown";
}

}  // namespace semtag
