export * from "./types.js";
export * from "./selection.js";
export * from "./view.js";
export * from "./judgment.js";
export * from "./api.js";
export * from "./controller.js";
