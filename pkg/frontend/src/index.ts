export { ApiClient, ApiError, type FetchLike } from "./api.js";
export { checkMark, type MarkCheck } from "./validation.js";
export { MarksFormController, escapeHtml, type SubmitResult } from "./marksForm.js";
export { ExplanationViewController } from "./explanationView.js";
export { RankingBoardController } from "./rankingBoard.js";
export { WhatIfPanelController } from "./whatIfPanel.js";
export * from "./types.js";
