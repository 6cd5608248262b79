export * from "./types";
export * from "./colors";
export * from "./state";
export * from "./render";
export * from "./api";
export * from "./session";
export * from "./controller";
export * from "./downloads";
export * from "./app";
