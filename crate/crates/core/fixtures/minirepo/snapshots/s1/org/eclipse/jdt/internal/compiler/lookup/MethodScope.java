package org.eclipse.jdt.internal.compiler.lookup;

import org.eclipse.jdt.internal.compiler.flow.FlowInfo;
import org.eclipse.jdt.internal.compiler.flow.UnconditionalFlowInfo;

/**
 * Scope of a method body or of a field initializer. Tracks the definite
 * assignment state of fields while the initializers are analysed.
 */
public class MethodScope extends BlockScope {

	public boolean isStatic;
	public int lastIndex;
	public long[] definiteInits = new long[4];
	public long[][] extraDefiniteInits = new long[4][];

	public MethodScope(ClassScope parent, ReferenceContext context, boolean isStatic) {
		super(METHOD_SCOPE, parent);
		this.referenceContext = context;
		this.isStatic = isStatic;
		this.startIndex = 0;
	}

	/* Record the current definite assignment state of the initializers so
	 * that constructors can start their flow analysis from it. */
	public void recordInitializationStates(FlowInfo flowInfo) {
		if ((flowInfo.tagBits & FlowInfo.UNREACHABLE) != 0) return;
		UnconditionalFlowInfo unconditionalFlowInfo = flowInfo.unconditionalInitsWithoutSideEffect();
		long[] inits = unconditionalFlowInfo.extra[0];
		int index = this.lastIndex;
		this.definiteInits[index] = unconditionalFlowInfo.definiteInits;
		this.extraDefiniteInits[index] = inits;
	}

	// assign positions to the local variables of the method
	public void computeLocalVariablePositions(int initOffset, CodeStream codeStream) {
		this.offset = initOffset;
		this.maxOffset = this.offset;
		int ilocal = 0;
		int maxLocals = this.localIndex;
		while (ilocal < maxLocals) {
			LocalVariableBinding local = this.locals[ilocal];
			local.resolvedPosition = this.offset;
			this.offset++;
			ilocal++;
		}
	}

	public final boolean isInsideInitializer() {
		return this.referenceContext instanceof TypeDeclaration;
	}
}
